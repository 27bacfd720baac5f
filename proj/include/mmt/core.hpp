// core.hpp
// Mealy machines with timers (MMTs): model, untimed runs, symbolic words.
#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mmt {

// ── Actions and updates ─────────────────────────────────────────────────────

/// An action is an input symbol or the timeout of a timer.
/// States, timers, inputs and outputs are all identified by strings; within
/// one machine the state and timer namespaces must be disjoint.
struct Action {
  enum class Kind { input, timeout };
  Kind kind = Kind::input;
  std::string name;  // input symbol, or the timer that times out

  static Action in(std::string symbol) { return {Kind::input, std::move(symbol)}; }
  static Action to(std::string timer) { return {Kind::timeout, std::move(timer)}; }
  bool is_input() const { return kind == Kind::input; }
  bool is_timeout() const { return kind == Kind::timeout; }
  friend auto operator<=>(const Action&, const Action&) = default;
};

/// "i" for inputs, "to[x]" for timeouts.
std::string to_string(const Action& a);

/// A transition's update: (re)start a timer with an integer constant >= 1.
struct Start {
  std::string timer;
  int value = 0;
  friend auto operator<=>(const Start&, const Start&) = default;
};

/// nullopt means the transition starts no timer.
using Update = std::optional<Start>;

struct Transition {
  std::string to;
  std::string output;
  Update update;
};

// ── The machine ─────────────────────────────────────────────────────────────

/// A Mealy machine with timers. Well-formedness (see validate):
///  1. no timer is active in the initial state;
///  2. every timer active in the target of a transition is active in its
///     source, except at most the one started by the transition's update;
///  3. a to[x] transition requires x active in the source, and its update,
///     if any, restarts exactly x.
/// Declaration order of `inputs` and `timers` fixes the global action order
/// used for all deterministic iteration and tie-breaking.
struct Mmt {
  std::vector<std::string> timers;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::string> states;
  std::string initial;
  std::map<std::string, std::set<std::string>> active;  // chi
  std::map<std::pair<std::string, Action>, Transition> delta;

  const std::set<std::string>& active_of(const std::string& q) const;
  const Transition* find(const std::string& q, const Action& a) const;

  /// Index in declaration order; -1 when unknown.
  int timer_index(const std::string& x) const;
  int input_index(const std::string& i) const;
  int state_index(const std::string& q) const;

  /// All inputs in declaration order, then all timeouts in timer declaration
  /// order. Every deterministic enumeration of actions goes through this.
  std::vector<Action> global_actions() const;

  /// The subset of global_actions() defined at q, in the same order.
  std::vector<Action> actions_at(const std::string& q) const;
};

/// All well-formedness violations, empty if the machine is valid. Checks the
/// three conditions above plus referential integrity: known states, timers,
/// inputs and outputs on every transition, disjoint state/timer namespaces,
/// no duplicate identifiers, constants >= 1.
std::vector<std::string> validate(const Mmt& m);

/// Throws std::invalid_argument listing the violations, if any.
void require_valid(const Mmt& m);

// ── Untimed runs ─────────────────────────────────────────────────────────────

struct Step {
  Action action;
  std::string output;
  Update update;
  std::string to;
};

struct Run {
  std::string start;
  std::vector<Step> steps;

  const std::string& end() const { return steps.empty() ? start : steps.back().to; }
  std::size_t size() const { return steps.size(); }
  std::vector<Action> word() const;
};

/// Single transition lookup. Throws std::invalid_argument for an unknown
/// state; returns nullopt when delta is undefined on (q, a).
std::optional<Transition> step(const Mmt& m, const std::string& q, const Action& a);

/// Folds `step` over the word; nullopt as soon as a transition is missing.
std::optional<Run> run(const Mmt& m, const std::string& q,
                       const std::vector<Action>& word);

// ── Symbolic words ───────────────────────────────────────────────────────────

/// In a symbolic word, to[x] is replaced by the pair (c, j) of the constant
/// and the 1-based index of the step that last (re)started x before the
/// timeout: the timeout's cause.
struct SymbolicAction {
  bool input = true;
  std::string symbol;  // when input
  int value = 0;       // constant c, when timeout
  int index = 0;       // 1-based step index j of the cause, when timeout

  static SymbolicAction in(std::string s) { return {true, std::move(s), 0, 0}; }
  static SymbolicAction to(int c, int j) { return {false, "", c, j}; }
  friend auto operator<=>(const SymbolicAction&, const SymbolicAction&) = default;
};

using SymbolicWord = std::vector<SymbolicAction>;

/// "i i to[2,1] to[3,2]"
std::string to_string(const SymbolicWord& w);

/// The symbolic word read by a run from the initial state. Throws
/// std::invalid_argument if the run does not start at the initial state or
/// contains a timeout with no preceding (re)start of its timer.
SymbolicWord symbolic_of(const Mmt& m, const Run& r);

/// The unique run from the initial state reading w, if any. A timeout (c, j)
/// resolves to to[x] iff step j (re)started x with constant c and no later
/// step restarted or stopped x; nullopt when resolution or delta fails.
std::optional<Run> run_of_symbolic(const Mmt& m, const SymbolicWord& w);

/// Output projection of a run.
std::vector<std::string> output_word(const Run& r);

}  // namespace mmt
