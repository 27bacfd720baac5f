#pragma once
// Zone algebra over timer valuations and everything built on it: the zone-MMT
// construction (making any complete machine s-learnable), enabled-timer
// computation, completeness, and the symbolic-equivalence checker.

#include "mmt/core.hpp"
#include "mmt/rational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mmt {

// One difference-bound entry: +infinity, or value with a strictness flag.
struct Bound {
  bool inf = true;
  std::int64_t value = 0;
  bool strict = false;

  static Bound unbounded() { return {}; }
  static Bound le(std::int64_t v) { return {false, v, false}; }
  static Bound lt(std::int64_t v) { return {false, v, true}; }
  friend bool operator==(const Bound&, const Bound&) = default;
};

// (a + b) as bounds; infinity absorbs.
Bound bound_add(const Bound& a, const Bound& b);
// Strict order: a constrains more than b.
bool bound_tighter(const Bound& a, const Bound& b);

// A set of nonnegative valuations of a fixed timer list, stored as a
// difference-bound matrix over variable 0 (constant zero) and the timers.
// Kept canonical (all-pairs closed) after every operation, so structural
// equality of keys coincides with semantic equality.
class Zone {
 public:
  // No constraints beyond nonnegativity.
  static Zone universe(std::vector<std::string> timers);
  // The zone {∅} over the empty timer list: contains exactly the empty
  // valuation. Distinct from an empty zone.
  static Zone trivial();

  const std::vector<std::string>& timers() const { return timers_; }
  bool is_empty() const { return empty_; }

  // Bound on var_i - var_j, where index 0 is the constant and index t+1 the
  // t-th timer of the list.
  const Bound& at(int i, int j) const;

  // Membership of a valuation with domain exactly timers().
  bool contains(const std::map<std::string, Rat>& val) const;

  // {κ - d | κ ∈ Z, 0 <= d <= min κ}: uniform decrease, clamped nonnegative.
  Zone down() const;
  // Projection onto keep ⊆ timers(); keep = ∅ yields the trivial zone iff
  // this zone is nonempty.
  Zone restrict_to(const std::set<std::string>& keep) const;
  // Pins x = c, freeing any previous constraints on x; x may be fresh.
  Zone assign(const std::string& x, int c) const;
  // Intersection with x = 0; x must be in timers().
  Zone timeout(const std::string& x) const;

  // Canonical encoding: equal keys iff equal zones over equal timer lists.
  std::string key() const;
  friend bool operator==(const Zone& a, const Zone& b) {
    return a.key() == b.key();
  }

 private:
  std::vector<std::string> timers_;
  std::vector<Bound> mat_;  // (n+1)^2, row-major
  bool empty_ = false;

  Zone() = default;
  int dim() const { return static_cast<int>(timers_.size()) + 1; }
  int var(const std::string& x) const;  // -1 if unknown
  Bound& cell(int i, int j);
  void close();
};

// Free-function spelling of the zone operations.
Zone zone_down(const Zone& z);
Zone zone_restrict(const Zone& z, const std::set<std::string>& keep);
Zone zone_assign(const Zone& z, const std::string& x, int c);
Zone zone_timeout(const Zone& z, const std::string& x);

// Reachable zone states of a machine: pairs (base state, zone over its active
// timers), starting from (initial, {∅}). Timeout edges whose guard zone is
// empty are omitted; input edges missing in the machine are skipped, so this
// works for incomplete machines too (it underlies both enabled() and
// is_complete()). The embedded machine has state ids "base@k" with k a
// per-base serial in BFS discovery order.
struct ZoneMachine {
  Mmt machine;
  std::vector<std::string> base;  // parallel to machine.states
  std::vector<Zone> zones;        // parallel to machine.states
  std::map<std::string, int> index;
};
ZoneMachine zone_reach(const Mmt& m);

// The zone MMT of a complete machine: symbolically equivalent to m, complete,
// and with every run feasible (s-learnable). Throws std::invalid_argument if
// m is not complete.
Mmt build_zone_mmt(const Mmt& m);

// Timers that reach zero in some reachable configuration at q.
std::set<std::string> enabled(const Mmt& m, const std::string& q);

// Every state defines every input, and every enabled timeout is defined.
bool is_complete(const Mmt& m);

// Verdict of the symbolic-equivalence check. A counterexample word is in
// exactly one of the two symbolic languages (missing_in_*), or in both with
// different output words (output_mismatch).
struct SymEquivResult {
  enum class Kind { equivalent, missing_in_a, missing_in_b, output_mismatch };
  Kind kind = Kind::equivalent;
  SymbolicWord word;

  bool equivalent() const { return kind == Kind::equivalent; }
};
std::string to_string(SymEquivResult::Kind k);

// Decides symbolic equivalence of two complete machines over the same input
// alphabet by a BFS over the product of their zone MMTs. Timers started by
// the same step with the same constant are tracked as clean pairs; any other
// start, or losing one's partner, taints a timer, and a defined timeout of a
// tainted timer witnesses a word in one language only. Counterexamples are
// shortest in BFS layers and deterministic (actions explored in the fixed
// global order, left machine first). Throws std::invalid_argument if either
// machine is incomplete or the input alphabets differ as sets.
SymEquivResult symbolic_equiv(const Mmt& a, const Mmt& b);

}  // namespace mmt
