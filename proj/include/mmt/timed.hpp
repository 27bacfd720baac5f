#pragma once
// Timed semantics for Mealy machines with timers: configurations, delay and
// discrete steps, timed runs, feasibility of untimed runs via difference
// constraints, and synthesis of transparent race-free timed runs.
//
// All time arithmetic is exact rational; no floating point anywhere.

#include "mmt/core.hpp"
#include "mmt/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mmt {

// A configuration pairs a state with a valuation of exactly its active timers.
struct Configuration {
  std::string state;
  std::map<std::string, Rat> val;  // domain = active timers of `state`

  bool operator==(const Configuration&) const = default;
};

Configuration initial_configuration(const Mmt& m);

// Delay step: allowed iff every active timer is >= d (d nonnegative).
std::optional<Configuration> timed_step(const Mmt& m, const Configuration& c,
                                        const Rat& delay);

// Discrete step: inputs always fire if the edge exists; to[x] additionally
// requires val(x) == 0. Absent if no edge or the guard fails.
std::optional<Configuration> timed_step(const Mmt& m, const Configuration& c,
                                        const Action& a);

// Discrete step with the transition's output and update exposed.
struct TimedActionResult {
  Configuration after;
  std::string output;
  Update update;
};
std::optional<TimedActionResult> timed_action(const Mmt& m, const Configuration& c,
                                              const Action& a);

// A timed word alternates delays and actions, beginning and ending with a
// delay: d0 a1 d1 ... an dn. Invariant: delays.size() == actions.size() + 1.
struct TimedWord {
  std::vector<Rat> delays;
  std::vector<Action> actions;
};

// Text format: whitespace-separated alternation `0.5 i 1 to[x] 0`. Delays may
// be integers, decimals, or fractions p/q; `to[x]` denotes a timeout, any
// other symbol an input. Tokens are interpreted by position, so the token
// count must be odd. Throws std::invalid_argument on malformed input.
TimedWord parse_timed_word(const std::string& text);
std::string to_string(const TimedWord& w);

// One discrete event of a timed run, with its absolute time and the
// configuration reached immediately after the transition.
struct TimedEvent {
  Rat time;
  Action action;
  std::string output;
  Update update;
  Configuration after;
};

struct TimedRun {
  Configuration start;
  std::vector<TimedEvent> events;
  Rat total;          // end time; the run ends with a delay back to `end`
  Configuration end;  // configuration after the final delay

  // Untimed projection (drops delays, keeps transitions).
  Run untime() const;
  // The timed word this run reads.
  TimedWord word() const;
};

// Runs a timed word from the initial configuration. The run is uniquely
// determined; absent at the first blocked step (illegal delay, missing edge,
// or timeout guard failure).
std::optional<TimedRun> run_timed_word(const Mmt& m, const TimedWord& w);

// Runs a timed word whose actions are all inputs, firing every timeout that
// expires strictly before the next input (and any that expire up to and
// including the end of the word). Simultaneous expiries fire in timer
// declaration order; this tie-break is only exercised on inputs that are not
// race-avoiding. Requires a complete machine (throws std::invalid_argument
// otherwise, or if w contains a timeout action).
TimedRun run_timed_input(const Mmt& m, const TimedWord& w);

// Difference constraint s_k - s_j <= bound (or < if strict) over the prefix
// sums s_0..s_{n+1} of a run's delays: s_0 = 0 is the start, s_k the time of
// the k-th action, s_{n+1} the end of the run.
struct DiffConstraint {
  int k = 0;
  int j = 0;
  long long bound = 0;
  bool strict = false;

  friend auto operator<=>(const DiffConstraint&, const DiffConstraint&) = default;
};

// The constraint system of an untimed run. Satisfiability of `constraints`
// alone characterizes the existence of a race-free timed realization with
// strictly positive delays; `frac_distinct` lists the action indices (the
// input positions) whose times must additionally have pairwise-distinct
// fractional parts for transparency.
struct DelayConstraintSystem {
  int n = 0;  // number of actions; variables s_0..s_{n+1}
  std::vector<DiffConstraint> constraints;
  std::vector<int> frac_distinct;
};

// Builds the constraint system for an untimed action word read from the
// initial state. Emits, per the race-free realization argument:
//   - strict positivity of every delay,
//   - for each timeout, the spanning equality  s_k - s_j = c  to its cause,
//   - race-freeness: every other active timer stays strictly positive at each
//     timeout, and no active timer reaches zero at the end of the run,
//   - a strict upper bound whenever a started timer is restarted or stopped
//     before expiring.
// The final action may be a timeout with no transition in m (a probe), as
// long as the timer is active with an in-run cause; a missing edge anywhere
// else throws std::invalid_argument.
DelayConstraintSystem constraints_of(const Mmt& m, const std::vector<Action>& word);
DelayConstraintSystem constraints_of(const Mmt& m, const Run& r);

// Satisfiability by negative-cycle detection with a strictness bit per edge.
bool satisfiable(const DelayConstraintSystem& sys);

// Feasibility of an untimed run: a timed realization exists (race-free, with
// positive delays). The word form allows a final timeout probe as above.
bool is_feasible(const Mmt& m, const std::vector<Action>& word);
bool is_feasible(const Mmt& m, const Run& r);

// The pointwise-minimal solution (earliest-deadline): each s_k as small as
// the constraints allow. Absent iff unsatisfiable. Result has size n + 2.
std::optional<std::vector<Rat>> solve_earliest(const DelayConstraintSystem& sys);

// Synthesizes a transparent, race-free timed run realizing r: all delays
// strictly positive, no two timers simultaneously at zero, and the input
// start times have pairwise-distinct fractional parts. Works by solving the
// difference system, then perturbing input times by distinct multiples of a
// rational chosen small enough to keep every strict constraint slack (timeout
// times follow their cause chains). Absent iff r is infeasible.
std::optional<TimedRun> synth_transparent(const Mmt& m, const Run& r);

// Checks that no timer other than one currently timing out ever reaches zero
// along the run, and that none is at zero at the end.
bool race_free(const Mmt& m, const TimedRun& run);

// Checks pairwise-distinct fractional parts of the input event times.
bool distinct_input_fractions(const TimedRun& run);

}  // namespace mmt
