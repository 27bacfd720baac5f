#include "mmt/zones.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace mmt {

Bound bound_add(const Bound& a, const Bound& b) {
  if (a.inf || b.inf) return Bound::unbounded();
  return {false, a.value + b.value, a.strict || b.strict};
}

bool bound_tighter(const Bound& a, const Bound& b) {
  if (b.inf) return !a.inf;
  if (a.inf) return false;
  return a.value < b.value || (a.value == b.value && a.strict && !b.strict);
}

namespace {
const Bound& bound_min(const Bound& a, const Bound& b) {
  return bound_tighter(a, b) ? a : b;
}
}  // namespace

// ── Zone ─────────────────────────────────────────────────────────────────────

Zone Zone::universe(std::vector<std::string> timers) {
  Zone z;
  z.timers_ = std::move(timers);
  const int d = z.dim();
  z.mat_.assign(d * d, Bound::unbounded());
  for (int i = 0; i < d; ++i) z.cell(i, i) = Bound::le(0);
  for (int j = 1; j < d; ++j) z.cell(0, j) = Bound::le(0);  // 0 - x_j <= 0
  return z;
}

Zone Zone::trivial() { return universe({}); }

const Bound& Zone::at(int i, int j) const { return mat_[i * dim() + j]; }
Bound& Zone::cell(int i, int j) { return mat_[i * dim() + j]; }

int Zone::var(const std::string& x) const {
  for (std::size_t t = 0; t < timers_.size(); ++t)
    if (timers_[t] == x) return static_cast<int>(t) + 1;
  return -1;
}

void Zone::close() {
  if (empty_) return;
  const int d = dim();
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Bound via = bound_add(at(i, k), at(k, j));
        if (bound_tighter(via, at(i, j))) cell(i, j) = via;
      }
  for (int i = 0; i < d; ++i) {
    const Bound& diag = at(i, i);
    if (!diag.inf && (diag.value < 0 || (diag.value == 0 && diag.strict))) {
      empty_ = true;
      return;
    }
    cell(i, i) = Bound::le(0);
  }
}

bool Zone::contains(const std::map<std::string, Rat>& val) const {
  if (empty_) return false;
  if (val.size() != timers_.size()) return false;
  std::vector<Rat> v(dim(), Rat(0));
  for (const auto& [x, r] : val) {
    int i = var(x);
    if (i < 0) return false;
    v[i] = r;
  }
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j) {
      const Bound& b = at(i, j);
      if (b.inf) continue;
      Rat diff = v[i] - v[j];
      if (diff > Rat(b.value) || (diff == Rat(b.value) && b.strict)) return false;
    }
  return true;
}

Zone Zone::down() const {
  Zone z = *this;
  if (z.empty_) return z;
  for (int j = 1; j < z.dim(); ++j) z.cell(0, j) = Bound::le(0);
  z.close();
  return z;
}

Zone Zone::restrict_to(const std::set<std::string>& keep) const {
  std::vector<int> old_idx = {0};
  std::vector<std::string> kept;
  for (std::size_t t = 0; t < timers_.size(); ++t)
    if (keep.count(timers_[t])) {
      old_idx.push_back(static_cast<int>(t) + 1);
      kept.push_back(timers_[t]);
    }
  if (kept.size() != keep.size())
    throw std::invalid_argument("zone restriction to timers outside the domain");
  Zone z;
  z.timers_ = std::move(kept);
  z.empty_ = empty_;
  const int d = z.dim();
  z.mat_.assign(d * d, Bound::unbounded());
  // A closed matrix projects by dropping rows and columns.
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) z.cell(i, j) = at(old_idx[i], old_idx[j]);
  return z;
}

Zone Zone::assign(const std::string& x, int c) const {
  Zone z = *this;
  int ix = z.var(x);
  if (ix < 0) {
    z.timers_.push_back(x);
    const int d = z.dim();
    std::vector<Bound> grown(d * d, Bound::unbounded());
    for (int i = 0; i + 1 < d; ++i)
      for (int j = 0; j + 1 < d; ++j) grown[i * d + j] = at(i, j);
    z.mat_ = std::move(grown);
    ix = d - 1;
    z.cell(ix, ix) = Bound::le(0);
  } else {
    for (int j = 0; j < z.dim(); ++j)
      if (j != ix) {
        z.cell(ix, j) = Bound::unbounded();
        z.cell(j, ix) = Bound::unbounded();
      }
  }
  z.cell(ix, 0) = Bound::le(c);
  z.cell(0, ix) = Bound::le(-c);
  z.close();
  return z;
}

Zone Zone::timeout(const std::string& x) const {
  int ix = var(x);
  if (ix < 0) throw std::invalid_argument("timeout of a timer outside the zone: " + x);
  Zone z = *this;
  z.cell(ix, 0) = bound_min(z.at(ix, 0), Bound::le(0));
  z.cell(0, ix) = bound_min(z.at(0, ix), Bound::le(0));
  z.close();
  return z;
}

std::string Zone::key() const {
  std::ostringstream os;
  if (empty_) os << "!";
  for (const auto& x : timers_) os << x << ",";
  os << "|";
  if (empty_) return os.str();
  for (const auto& b : mat_) {
    if (b.inf)
      os << "inf;";
    else
      os << b.value << (b.strict ? "<" : "=") << ";";
  }
  return os.str();
}

Zone zone_down(const Zone& z) { return z.down(); }
Zone zone_restrict(const Zone& z, const std::set<std::string>& keep) {
  return z.restrict_to(keep);
}
Zone zone_assign(const Zone& z, const std::string& x, int c) { return z.assign(x, c); }
Zone zone_timeout(const Zone& z, const std::string& x) { return z.timeout(x); }

// ── Zone reachability and the zone MMT ───────────────────────────────────────

ZoneMachine zone_reach(const Mmt& m) {
  require_valid(m);
  ZoneMachine zm;
  zm.machine.timers = m.timers;
  zm.machine.inputs = m.inputs;
  zm.machine.outputs = m.outputs;

  std::map<std::string, int> serial;            // per-base-state id counter
  std::map<std::pair<std::string, std::string>, int> seen;  // (base, zone key)

  auto intern = [&](const std::string& base, const Zone& z) {
    auto k = std::make_pair(base, z.key());
    if (auto it = seen.find(k); it != seen.end()) return it->second;
    int id = static_cast<int>(zm.base.size());
    std::string name = base + "@" + std::to_string(serial[base]++);
    zm.base.push_back(base);
    zm.zones.push_back(z);
    zm.index[name] = id;
    zm.machine.states.push_back(name);
    zm.machine.active[name] = m.active_of(base);
    seen[k] = id;
    return id;
  };

  const auto actions = m.global_actions();
  int start = intern(m.initial, Zone::trivial());
  zm.machine.initial = zm.machine.states[start];
  std::deque<int> queue = {start};
  while (!queue.empty()) {
    int cur = queue.front();
    queue.pop_front();
    const std::string& base = zm.base[cur];
    const Zone& z = zm.zones[cur];
    for (const auto& a : actions) {
      const Transition* t = m.find(base, a);
      if (!t) continue;
      Zone after = z;
      if (a.is_timeout()) {
        after = after.timeout(a.name);
        if (after.is_empty()) continue;  // timeout unreachable here
      }
      if (t->update) after = after.assign(t->update->timer, t->update->value);
      Zone target = after.restrict_to(m.active_of(t->to)).down();
      bool fresh = seen.find({t->to, target.key()}) == seen.end();
      int next = intern(t->to, target);
      if (fresh) queue.push_back(next);
      zm.machine.delta[{zm.machine.states[cur], a}] =
          Transition{zm.machine.states[next], t->output, t->update};
    }
  }
  return zm;
}

namespace {

bool complete_given(const Mmt& m, const ZoneMachine& zm) {
  for (const auto& q : m.states)
    for (const auto& i : m.inputs)
      if (!m.find(q, Action::in(i))) return false;
  for (std::size_t s = 0; s < zm.base.size(); ++s)
    for (const auto& x : m.active_of(zm.base[s]))
      if (!zm.zones[s].timeout(x).is_empty() && !m.find(zm.base[s], Action::to(x)))
        return false;
  return true;
}

}  // namespace

Mmt build_zone_mmt(const Mmt& m) {
  ZoneMachine zm = zone_reach(m);
  if (!complete_given(m, zm))
    throw std::invalid_argument("zone MMT construction requires a complete machine");
  require_valid(zm.machine);
  return zm.machine;
}

std::set<std::string> enabled(const Mmt& m, const std::string& q) {
  if (m.state_index(q) < 0) throw std::invalid_argument("unknown state: " + q);
  ZoneMachine zm = zone_reach(m);
  std::set<std::string> out;
  for (std::size_t s = 0; s < zm.base.size(); ++s) {
    if (zm.base[s] != q) continue;
    for (const auto& x : m.active_of(q))
      if (!zm.zones[s].timeout(x).is_empty()) out.insert(x);
  }
  return out;
}

bool is_complete(const Mmt& m) { return complete_given(m, zone_reach(m)); }

// ── Symbolic equivalence ─────────────────────────────────────────────────────

std::string to_string(SymEquivResult::Kind k) {
  switch (k) {
    case SymEquivResult::Kind::equivalent: return "equivalent";
    case SymEquivResult::Kind::missing_in_a: return "missing-in-a";
    case SymEquivResult::Kind::missing_in_b: return "missing-in-b";
    case SymEquivResult::Kind::output_mismatch: return "output-mismatch";
  }
  return "?";
}

namespace {

// A product node: states on both sides, clean pairs of timers started by the
// same step with the same constant, and tainted timers whose cause has no
// counterpart on the other side.
struct PNode {
  int pa = 0, pb = 0;
  std::vector<std::pair<int, int>> pairs;  // (A timer index, B timer index)
  std::vector<int> ta, tb;                 // tainted timer indices

  std::string key() const {
    std::ostringstream os;
    os << pa << "/" << pb << "/";
    for (auto [x, y] : pairs) os << x << ":" << y << ",";
    os << "/";
    for (int x : ta) os << x << ",";
    os << "/";
    for (int y : tb) os << y << ",";
    return os.str();
  }
};

// How a node was reached (for counterexample reconstruction).
struct PStep {
  enum class Kind { input, timeout_a, timeout_b } kind = Kind::input;
  int idx = 0;  // input index, A timer index, or B timer index
};

struct Product {
  const Mmt& A;
  const Mmt& B;

  std::vector<PNode> nodes;
  std::vector<int> parent;
  std::vector<PStep> step;
  std::map<std::string, int> seen;

  bool aliveA(const Transition& e, int x) const {
    return A.active_of(e.to).count(A.timers[x]) > 0;
  }
  bool aliveB(const Transition& e, int y) const {
    return B.active_of(e.to).count(B.timers[y]) > 0;
  }

  PNode successor(const PNode& n, const Transition& eA, const Transition& eB) const {
    PNode out;
    out.pa = A.state_index(eA.to);
    out.pb = B.state_index(eB.to);
    std::optional<std::pair<int, int>> sA, sB;  // (timer index, constant)
    if (eA.update && A.active_of(eA.to).count(eA.update->timer))
      sA = {A.timer_index(eA.update->timer), eA.update->value};
    if (eB.update && B.active_of(eB.to).count(eB.update->timer))
      sB = {B.timer_index(eB.update->timer), eB.update->value};

    for (auto [x, y] : n.pairs) {
      bool rx = sA && sA->first == x, ry = sB && sB->first == y;
      if (rx || ry) {
        // Restart dissolves the pair; the untouched survivor is tainted and
        // the restarted member re-enters through the start pairing below.
        if (!rx && aliveA(eA, x)) out.ta.push_back(x);
        if (!ry && aliveB(eB, y)) out.tb.push_back(y);
        continue;
      }
      bool ax = aliveA(eA, x), ay = aliveB(eB, y);
      if (ax && ay)
        out.pairs.emplace_back(x, y);
      else if (ax)
        out.ta.push_back(x);
      else if (ay)
        out.tb.push_back(y);
    }
    for (int x : n.ta)
      if (!(sA && sA->first == x) && aliveA(eA, x)) out.ta.push_back(x);
    for (int y : n.tb)
      if (!(sB && sB->first == y) && aliveB(eB, y)) out.tb.push_back(y);

    if (sA && sB) {
      if (sA->second == sB->second)
        out.pairs.emplace_back(sA->first, sB->first);
      else {
        out.ta.push_back(sA->first);
        out.tb.push_back(sB->first);
      }
    } else if (sA) {
      out.ta.push_back(sA->first);
    } else if (sB) {
      out.tb.push_back(sB->first);
    }

    std::sort(out.pairs.begin(), out.pairs.end());
    std::sort(out.ta.begin(), out.ta.end());
    std::sort(out.tb.begin(), out.tb.end());
    return out;
  }

  // Replays the stored path to node `at`, then appends `last`, producing the
  // symbolic word. Cause maps are rebuilt forward; a clean pair shares one
  // cause, so either side names the same symbolic timeout.
  SymbolicWord reconstruct(int at, const PStep& last) const {
    std::vector<int> chain;
    for (int v = at; v > 0; v = parent[v]) chain.push_back(v);
    std::reverse(chain.begin(), chain.end());

    SymbolicWord w;
    std::map<int, std::pair<int, int>> causeA, causeB;  // timer -> (c, step)
    int qa = nodes[0].pa, qb = nodes[0].pb;
    int prev = 0;
    for (int v : chain) {
      const PStep st = step[v];
      const int k = static_cast<int>(w.size()) + 1;
      const Transition* eA = nullptr;
      const Transition* eB = nullptr;
      if (st.kind == PStep::Kind::input) {
        const std::string& name = A.inputs[st.idx];
        w.push_back(SymbolicAction::in(name));
        eA = A.find(A.states[qa], Action::in(name));
        eB = B.find(B.states[qb], Action::in(name));
      } else {
        // Intermediate product timeouts always step a clean pair.
        int x = st.idx;
        int y = -1;
        for (auto [px, py] : nodes[prev].pairs)
          if (px == x) y = py;
        auto [c, j] = causeA.at(x);
        w.push_back(SymbolicAction::to(c, j));
        eA = A.find(A.states[qa], Action::to(A.timers[x]));
        eB = B.find(B.states[qb], Action::to(B.timers[y]));
      }
      if (eA->update && A.active_of(eA->to).count(eA->update->timer))
        causeA[A.timer_index(eA->update->timer)] = {eA->update->value, k};
      if (eB->update && B.active_of(eB->to).count(eB->update->timer))
        causeB[B.timer_index(eB->update->timer)] = {eB->update->value, k};
      qa = nodes[v].pa;
      qb = nodes[v].pb;
      prev = v;
    }

    // The offending action itself.
    switch (last.kind) {
      case PStep::Kind::input:
        w.push_back(SymbolicAction::in(A.inputs[last.idx]));
        break;
      case PStep::Kind::timeout_a: {
        auto [c, j] = causeA.at(last.idx);
        w.push_back(SymbolicAction::to(c, j));
        break;
      }
      case PStep::Kind::timeout_b: {
        auto [c, j] = causeB.at(last.idx);
        w.push_back(SymbolicAction::to(c, j));
        break;
      }
    }
    return w;
  }
};

}  // namespace

SymEquivResult symbolic_equiv(const Mmt& a, const Mmt& b) {
  if (std::set<std::string>(a.inputs.begin(), a.inputs.end()) !=
      std::set<std::string>(b.inputs.begin(), b.inputs.end()))
    throw std::invalid_argument("symbolic equivalence needs equal input alphabets");
  ZoneMachine za = zone_reach(a), zb = zone_reach(b);
  if (!complete_given(a, za))
    throw std::invalid_argument("left machine is not complete");
  if (!complete_given(b, zb))
    throw std::invalid_argument("right machine is not complete");

  Product P{za.machine, zb.machine, {}, {}, {}, {}};
  const Mmt& A = P.A;
  const Mmt& B = P.B;

  PNode root;
  root.pa = A.state_index(A.initial);
  root.pb = B.state_index(B.initial);
  P.nodes.push_back(root);
  P.parent.push_back(-1);
  P.step.push_back({});
  P.seen[root.key()] = 0;

  std::deque<int> queue = {0};
  auto push = [&](const PNode& n, int from, PStep how) {
    auto k = n.key();
    if (P.seen.count(k)) return;
    P.seen[k] = static_cast<int>(P.nodes.size());
    P.nodes.push_back(n);
    P.parent.push_back(from);
    P.step.push_back(how);
    queue.push_back(static_cast<int>(P.nodes.size()) - 1);
  };

  while (!queue.empty()) {
    int cur = queue.front();
    queue.pop_front();
    const PNode n = P.nodes[cur];
    const std::string& qa = A.states[n.pa];
    const std::string& qb = B.states[n.pb];

    for (std::size_t i = 0; i < A.inputs.size(); ++i) {
      PStep st{PStep::Kind::input, static_cast<int>(i)};
      const Transition* eA = A.find(qa, Action::in(A.inputs[i]));
      const Transition* eB = B.find(qb, Action::in(A.inputs[i]));
      if (eA->output != eB->output)
        return {SymEquivResult::Kind::output_mismatch, P.reconstruct(cur, st)};
      push(P.successor(n, *eA, *eB), cur, st);
    }

    for (std::size_t x = 0; x < A.timers.size(); ++x) {
      int y = -1;
      bool tainted = std::find(n.ta.begin(), n.ta.end(), static_cast<int>(x)) != n.ta.end();
      for (auto [px, py] : n.pairs)
        if (px == static_cast<int>(x)) y = py;
      if (y < 0 && !tainted) continue;
      const Transition* eA = A.find(qa, Action::to(A.timers[x]));
      if (tainted) {
        if (eA) {
          PStep st{PStep::Kind::timeout_a, static_cast<int>(x)};
          return {SymEquivResult::Kind::missing_in_b, P.reconstruct(cur, st)};
        }
        continue;
      }
      const Transition* eB = B.find(qb, Action::to(B.timers[y]));
      if (eA && eB) {
        PStep st{PStep::Kind::timeout_a, static_cast<int>(x)};
        if (eA->output != eB->output)
          return {SymEquivResult::Kind::output_mismatch, P.reconstruct(cur, st)};
        push(P.successor(n, *eA, *eB), cur, st);
      } else if (eA) {
        PStep st{PStep::Kind::timeout_a, static_cast<int>(x)};
        return {SymEquivResult::Kind::missing_in_b, P.reconstruct(cur, st)};
      } else if (eB) {
        PStep st{PStep::Kind::timeout_b, y};
        return {SymEquivResult::Kind::missing_in_a, P.reconstruct(cur, st)};
      }
    }

    for (std::size_t y = 0; y < B.timers.size(); ++y) {
      if (std::find(n.tb.begin(), n.tb.end(), static_cast<int>(y)) == n.tb.end()) continue;
      if (B.find(qb, Action::to(B.timers[y]))) {
        PStep st{PStep::Kind::timeout_b, static_cast<int>(y)};
        return {SymEquivResult::Kind::missing_in_a, P.reconstruct(cur, st)};
      }
    }
  }
  return {};
}

}  // namespace mmt
