// rational.hpp
// Exact rational arithmetic for delays and timer values.
#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>

namespace mmt {

/// All time quantities (delays, timer values, constraint bounds) are exact
/// rationals; no floating point is used anywhere in the library.
using Rat = boost::rational<std::int64_t>;

/// Parses "3", "-1", "1/2" or a decimal like "0.75" into a rational.
/// Throws std::invalid_argument on malformed input.
Rat parse_rat(const std::string& text);

/// Canonical textual form: integers as "n", everything else as "p/q" reduced.
std::string format_rat(const Rat& r);

/// Largest integer <= r.
std::int64_t floor_rat(const Rat& r);

/// Fractional part r - floor(r), always in [0, 1).
Rat frac_part(const Rat& r);

}  // namespace mmt
