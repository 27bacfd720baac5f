#include "mmt/core.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace mmt {

std::string to_string(const Action& a) {
  return a.is_input() ? a.name : "to[" + a.name + "]";
}

// ── Mmt accessors ────────────────────────────────────────────────────────────

const std::set<std::string>& Mmt::active_of(const std::string& q) const {
  auto it = active.find(q);
  if (it == active.end()) throw std::invalid_argument("unknown state: " + q);
  return it->second;
}

const Transition* Mmt::find(const std::string& q, const Action& a) const {
  auto it = delta.find({q, a});
  return it == delta.end() ? nullptr : &it->second;
}

namespace {
int index_of(const std::vector<std::string>& xs, const std::string& x) {
  auto it = std::find(xs.begin(), xs.end(), x);
  return it == xs.end() ? -1 : static_cast<int>(it - xs.begin());
}
}  // namespace

int Mmt::timer_index(const std::string& x) const { return index_of(timers, x); }
int Mmt::input_index(const std::string& i) const { return index_of(inputs, i); }
int Mmt::state_index(const std::string& q) const { return index_of(states, q); }

std::vector<Action> Mmt::global_actions() const {
  std::vector<Action> out;
  out.reserve(inputs.size() + timers.size());
  for (const auto& i : inputs) out.push_back(Action::in(i));
  for (const auto& x : timers) out.push_back(Action::to(x));
  return out;
}

std::vector<Action> Mmt::actions_at(const std::string& q) const {
  std::vector<Action> out;
  for (const auto& a : global_actions())
    if (find(q, a)) out.push_back(a);
  return out;
}

// ── validate ─────────────────────────────────────────────────────────────────

std::vector<std::string> validate(const Mmt& m) {
  std::vector<std::string> bad;
  auto complain = [&](const std::string& msg) { bad.push_back(msg); };

  auto check_distinct = [&](const std::vector<std::string>& xs, const std::string& what) {
    std::set<std::string> seen;
    for (const auto& x : xs) {
      if (x.empty()) complain("empty " + what + " identifier");
      if (!seen.insert(x).second) complain("duplicate " + what + ": " + x);
    }
  };
  check_distinct(m.timers, "timer");
  check_distinct(m.inputs, "input");
  check_distinct(m.outputs, "output");
  check_distinct(m.states, "state");

  std::set<std::string> states(m.states.begin(), m.states.end());
  std::set<std::string> timers(m.timers.begin(), m.timers.end());
  std::set<std::string> inputs(m.inputs.begin(), m.inputs.end());
  std::set<std::string> outputs(m.outputs.begin(), m.outputs.end());

  for (const auto& q : m.states)
    if (timers.count(q)) complain("state and timer namespaces overlap on: " + q);

  if (!states.count(m.initial)) complain("initial state not declared: " + m.initial);

  for (const auto& [q, chi] : m.active) {
    if (!states.count(q)) complain("active set for unknown state: " + q);
    for (const auto& x : chi)
      if (!timers.count(x)) complain("unknown active timer " + x + " at state " + q);
  }
  for (const auto& q : m.states)
    if (!m.active.count(q)) complain("missing active set for state: " + q);

  if (states.count(m.initial) && m.active.count(m.initial) && !m.active.at(m.initial).empty())
    complain("initial state has active timers");

  for (const auto& [key, t] : m.delta) {
    const auto& [q, a] = key;
    std::string where = "transition (" + q + ", " + to_string(a) + ")";
    if (!states.count(q) || !states.count(t.to)) {
      complain(where + " references an unknown state");
      continue;
    }
    if (a.is_input() && !inputs.count(a.name)) complain(where + ": unknown input");
    if (a.is_timeout() && !timers.count(a.name)) complain(where + ": unknown timer");
    if (!outputs.count(t.output)) complain(where + ": unknown output " + t.output);
    if (t.update) {
      if (!timers.count(t.update->timer)) complain(where + ": unknown started timer");
      if (t.update->value < 1) complain(where + ": start constant must be >= 1");
    }
    if (!m.active.count(q) || !m.active.count(t.to)) continue;
    const auto& src = m.active.at(q);
    const auto& dst = m.active.at(t.to);
    // Condition 2: target timers come from the source, minus the started one.
    for (const auto& x : dst) {
      if (t.update && t.update->timer == x) continue;
      if (!src.count(x)) complain(where + ": timer " + x + " appears in target without a start");
    }
    // Condition 3: timeouts need their timer active, and may only restart it.
    if (a.is_timeout()) {
      if (!src.count(a.name)) complain(where + ": timed-out timer not active in source");
      if (t.update && t.update->timer != a.name)
        complain(where + ": timeout update must restart exactly " + a.name);
    }
  }
  return bad;
}

void require_valid(const Mmt& m) {
  auto bad = validate(m);
  if (bad.empty()) return;
  std::ostringstream os;
  os << "invalid machine:";
  for (const auto& msg : bad) os << "\n  - " << msg;
  throw std::invalid_argument(os.str());
}

// ── Runs ─────────────────────────────────────────────────────────────────────

std::vector<Action> Run::word() const {
  std::vector<Action> w;
  w.reserve(steps.size());
  for (const auto& s : steps) w.push_back(s.action);
  return w;
}

std::optional<Transition> step(const Mmt& m, const std::string& q, const Action& a) {
  if (m.state_index(q) < 0) throw std::invalid_argument("unknown state: " + q);
  const Transition* t = m.find(q, a);
  return t ? std::optional<Transition>(*t) : std::nullopt;
}

std::optional<Run> run(const Mmt& m, const std::string& q,
                       const std::vector<Action>& word) {
  Run r{q, {}};
  std::string cur = q;
  for (const auto& a : word) {
    auto t = step(m, cur, a);
    if (!t) return std::nullopt;
    r.steps.push_back({a, t->output, t->update, t->to});
    cur = t->to;
  }
  return r;
}

// ── Symbolic words ───────────────────────────────────────────────────────────

std::string to_string(const SymbolicWord& w) {
  std::ostringstream os;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (k) os << ' ';
    if (w[k].input)
      os << w[k].symbol;
    else
      os << "to[" << w[k].value << ',' << w[k].index << ']';
  }
  return os.str();
}

SymbolicWord symbolic_of(const Mmt& m, const Run& r) {
  if (r.start != m.initial)
    throw std::invalid_argument("symbolic_of requires a run from the initial state");
  SymbolicWord w;
  // cause[x] = (c, j): step j was the last (re)start of x seen so far.
  std::map<std::string, std::pair<int, int>> cause;
  for (std::size_t k = 0; k < r.steps.size(); ++k) {
    const Step& s = r.steps[k];
    if (s.action.is_input()) {
      w.push_back(SymbolicAction::in(s.action.name));
    } else {
      auto it = cause.find(s.action.name);
      if (it == cause.end())
        throw std::invalid_argument("timeout of " + s.action.name +
                                    " has no preceding start in the run");
      w.push_back(SymbolicAction::to(it->second.first, it->second.second));
    }
    if (s.update) cause[s.update->timer] = {s.update->value, static_cast<int>(k) + 1};
  }
  return w;
}

std::optional<Run> run_of_symbolic(const Mmt& m, const SymbolicWord& w) {
  Run r{m.initial, {}};
  std::string cur = m.initial;
  // started[j] = timer started by step j; cause[x] = step that last started x.
  std::map<int, std::pair<std::string, int>> started;  // j -> (timer, constant)
  std::map<std::string, int> cause;
  for (std::size_t k = 0; k < w.size(); ++k) {
    Action a;
    if (w[k].input) {
      a = Action::in(w[k].symbol);
    } else {
      auto it = started.find(w[k].index);
      if (it == started.end()) return std::nullopt;
      const auto& [x, c] = it->second;
      // The reference is stale if x was restarted after step j; stops are
      // covered below because to[x] is then undefined at the current state.
      if (c != w[k].value) return std::nullopt;
      if (auto jt = cause.find(x); jt == cause.end() || jt->second != w[k].index)
        return std::nullopt;
      a = Action::to(x);
    }
    auto t = step(m, cur, a);
    if (!t) return std::nullopt;
    r.steps.push_back({a, t->output, t->update, t->to});
    if (t->update) {
      started[static_cast<int>(k) + 1] = {t->update->timer, t->update->value};
      cause[t->update->timer] = static_cast<int>(k) + 1;
    }
    // A stopped timer keeps its stale cause entry; resolution then fails at
    // the delta lookup since to[x] needs x active.
    cur = t->to;
  }
  return r;
}

std::vector<std::string> output_word(const Run& r) {
  std::vector<std::string> out;
  out.reserve(r.steps.size());
  for (const auto& s : r.steps) out.push_back(s.output);
  return out;
}

}  // namespace mmt
