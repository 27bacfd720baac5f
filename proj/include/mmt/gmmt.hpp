// gmmt.hpp
// Generalized MMTs: transitions carry injective update functions that may
// rename timers, and the conversion back to ordinary MMTs.
#pragma once

#include "mmt/core.hpp"
#include "mmt/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mmt {

/// Update function of a gMMT transition. The full function u has domain
/// exactly chi(target): u(x) = renames[x] (a timer active in the source; the
/// new x keeps that timer's value), or u(x) = start->value when x is the
/// started timer. Rename values must be distinct and at most one timer may be
/// started; identity renames are written out explicitly.
struct UpdateFn {
  std::map<std::string, std::string> renames;  // dest timer -> source timer
  std::optional<Start> start;                  // dest timer := integer

  bool defines(const std::string& x) const {
    return renames.count(x) || (start && start->timer == x);
  }
};

struct GTransition {
  std::string to;
  std::string output;
  UpdateFn update;
};

struct Gmmt {
  std::vector<std::string> timers;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::string> states;
  std::string initial;
  std::map<std::string, std::set<std::string>> active;
  std::map<std::pair<std::string, Action>, GTransition> delta;

  const std::set<std::string>& active_of(const std::string& q) const;
  const GTransition* find(const std::string& q, const Action& a) const;
  int timer_index(const std::string& x) const;
  std::vector<Action> global_actions() const;
};

/// Well-formedness: referential integrity as for MMTs; per transition the
/// update's domain is exactly chi(target), renames map injectively into
/// chi(source), and a to[x] transition requires x active in the source and
/// x not used as a rename value.
std::vector<std::string> validate_gmmt(const Gmmt& g);
void require_valid(const Gmmt& g);

// ── Configuration semantics ──────────────────────────────────────────────────

struct GConfig {
  std::string state;
  std::map<std::string, Rat> val;  // domain = chi(state)
};

GConfig gmmt_initial(const Gmmt& g);

/// Delay transition: every active timer must hold at least d.
std::optional<GConfig> gmmt_delay(const Gmmt& g, const GConfig& c, const Rat& d);

/// Discrete transition: a timeout requires its timer at zero; the new
/// valuation is val'(x) = c for the started timer and val'(x) =
/// val(renames[x]) otherwise. Returns nullopt when delta is undefined or the
/// timeout guard fails.
struct GStep {
  std::string output;
  GConfig after;
};
std::optional<GStep> gmmt_step(const Gmmt& g, const GConfig& c, const Action& a);

// ── Conversion ───────────────────────────────────────────────────────────────

/// Converts a gMMT into an equivalent MMT over a pool of timers x1..xn with
/// n = max |chi(q)|. States are pairs (q, mu) of a gMMT state and an
/// injective map chi(q) -> pool, rendered "q{x:x1,y:x2}". A timer started on
/// an input is assigned the lowest-index pool timer unused after the renames;
/// a start on a to[x] transition restarts mu(x), as MMT timeouts may only
/// restart their own timer. Only reachable pairs are built. Throws
/// std::invalid_argument if g is invalid or the result is not complete (the
/// conversion requires a complete gMMT).
Mmt gmmt_to_mmt(const Gmmt& g);

}  // namespace mmt
