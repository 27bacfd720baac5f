#include "mmt/rational.hpp"

#include <cstdlib>
#include <stdexcept>

namespace mmt {

Rat parse_rat(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  auto parse_int = [](const std::string& s) -> std::int64_t {
    std::size_t pos = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed rational literal: '" + s + "'");
    }
    if (pos != s.size())
      throw std::invalid_argument("malformed rational literal: '" + s + "'");
    return v;
  };
  if (auto slash = text.find('/'); slash != std::string::npos) {
    std::int64_t num = parse_int(text.substr(0, slash));
    std::int64_t den = parse_int(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
    return Rat(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string::npos) {
    std::string head = text.substr(0, dot);
    std::string tail = text.substr(dot + 1);
    if (tail.empty() || tail.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("malformed decimal literal: '" + text + "'");
    bool negative = !head.empty() && head[0] == '-';
    std::int64_t whole = head.empty() || head == "-" ? 0 : parse_int(head);
    std::int64_t den = 1;
    for (std::size_t k = 0; k < tail.size(); ++k) {
      if (den > (INT64_MAX / 10)) throw std::invalid_argument("decimal literal too long: '" + text + "'");
      den *= 10;
    }
    std::int64_t frac = tail.empty() ? 0 : parse_int(tail);
    Rat magnitude = Rat(std::llabs(whole)) + Rat(frac, den);
    return negative || whole < 0 ? -magnitude : magnitude;
  }
  return Rat(parse_int(text));
}

std::string format_rat(const Rat& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::int64_t floor_rat(const Rat& r) {
  std::int64_t q = r.numerator() / r.denominator();
  if (r.numerator() % r.denominator() != 0 && r < 0) --q;
  return q;
}

Rat frac_part(const Rat& r) { return r - Rat(floor_rat(r)); }

}  // namespace mmt
