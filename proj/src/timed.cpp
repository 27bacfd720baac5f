#include "mmt/timed.hpp"

#include "mmt/zones.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mmt {

Configuration initial_configuration(const Mmt& m) {
  if (!m.active_of(m.initial).empty())
    throw std::invalid_argument("initial state has active timers");
  return {m.initial, {}};
}

std::optional<Configuration> timed_step(const Mmt& m, const Configuration& c,
                                        const Rat& delay) {
  if (delay < Rat(0)) return std::nullopt;
  (void)m;
  Configuration out = c;
  for (auto& [x, v] : out.val) {
    if (v < delay) return std::nullopt;
    v -= delay;
  }
  return out;
}

std::optional<TimedActionResult> timed_action(const Mmt& m, const Configuration& c,
                                              const Action& a) {
  if (a.is_timeout()) {
    auto it = c.val.find(a.name);
    if (it == c.val.end() || it->second != Rat(0)) return std::nullopt;
  }
  auto t = step(m, c.state, a);
  if (!t) return std::nullopt;
  Configuration after;
  after.state = t->to;
  for (const auto& x : m.active_of(t->to)) {
    if (t->update && t->update->timer == x) {
      after.val[x] = Rat(t->update->value);
    } else {
      // Def.-style condition 2 guarantees x was active in the source.
      after.val[x] = c.val.at(x);
    }
  }
  return TimedActionResult{std::move(after), t->output, t->update};
}

std::optional<Configuration> timed_step(const Mmt& m, const Configuration& c,
                                        const Action& a) {
  auto r = timed_action(m, c, a);
  if (!r) return std::nullopt;
  return std::move(r->after);
}

TimedWord parse_timed_word(const std::string& text) {
  std::istringstream is(text);
  std::vector<std::string> tokens;
  std::string tok;
  while (is >> tok) tokens.push_back(tok);
  if (tokens.size() % 2 != 1)
    throw std::invalid_argument(
        "timed word must alternate delay/action and start and end with a delay");
  TimedWord w;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i % 2 == 0) {
      w.delays.push_back(parse_rat(tokens[i]));
      if (w.delays.back() < Rat(0))
        throw std::invalid_argument("negative delay in timed word");
    } else if (tokens[i].starts_with("to[") && tokens[i].ends_with("]")) {
      w.actions.push_back(Action::to(tokens[i].substr(3, tokens[i].size() - 4)));
    } else {
      w.actions.push_back(Action::in(tokens[i]));
    }
  }
  return w;
}

std::string to_string(const TimedWord& w) {
  std::string out = format_rat(w.delays.at(0));
  for (std::size_t i = 0; i < w.actions.size(); ++i) {
    out += " " + to_string(w.actions[i]);
    out += " " + format_rat(w.delays.at(i + 1));
  }
  return out;
}

Run TimedRun::untime() const {
  Run r;
  r.start = start.state;
  for (const auto& e : events)
    r.steps.push_back({e.action, e.output, e.update, e.after.state});
  return r;
}

TimedWord TimedRun::word() const {
  TimedWord w;
  Rat prev = 0;
  for (const auto& e : events) {
    w.delays.push_back(e.time - prev);
    w.actions.push_back(e.action);
    prev = e.time;
  }
  w.delays.push_back(total - prev);
  return w;
}

std::optional<TimedRun> run_timed_word(const Mmt& m, const TimedWord& w) {
  if (w.delays.size() != w.actions.size() + 1)
    throw std::invalid_argument("timed word must have one more delay than actions");
  TimedRun run;
  run.start = initial_configuration(m);
  Configuration cfg = run.start;
  Rat now = 0;
  for (std::size_t k = 0; k < w.actions.size(); ++k) {
    auto delayed = timed_step(m, cfg, w.delays[k]);
    if (!delayed) return std::nullopt;
    now += w.delays[k];
    auto res = timed_action(m, *delayed, w.actions[k]);
    if (!res) return std::nullopt;
    cfg = res->after;
    run.events.push_back({now, w.actions[k], res->output, res->update, cfg});
  }
  auto delayed = timed_step(m, cfg, w.delays.back());
  if (!delayed) return std::nullopt;
  run.total = now + w.delays.back();
  run.end = *delayed;
  return run;
}

TimedRun run_timed_input(const Mmt& m, const TimedWord& w) {
  if (w.delays.size() != w.actions.size() + 1)
    throw std::invalid_argument("timed word must have one more delay than actions");
  for (const auto& a : w.actions)
    if (!a.is_input())
      throw std::invalid_argument("run_timed_input takes a word over inputs only");
  if (!is_complete(m))
    throw std::invalid_argument("run_timed_input requires a complete machine");

  TimedRun run;
  run.start = initial_configuration(m);
  Configuration cfg = run.start;
  Rat now = 0;

  auto discrete = [&](const Action& a) {
    auto res = timed_action(m, cfg, a);
    if (!res) throw std::logic_error("complete machine lacks an edge for " + to_string(a));
    cfg = res->after;
    run.events.push_back({now, a, res->output, res->update, cfg});
  };

  // Fires every timeout expiring within the window; at the closed end of the
  // word the boundary instant itself counts. Simultaneous expiries fire in
  // timer declaration order.
  auto window = [&](Rat left, bool closed) {
    for (;;) {
      std::optional<std::pair<Rat, std::string>> next;
      for (const auto& x : m.timers) {
        auto it = cfg.val.find(x);
        if (it == cfg.val.end()) continue;
        if (!next || it->second < next->first) next = {it->second, x};
      }
      if (!next) break;
      if (closed ? next->first > left : next->first >= left) break;
      for (auto& [x, v] : cfg.val) v -= next->first;
      now += next->first;
      left -= next->first;
      discrete(Action::to(next->second));
    }
    for (auto& [x, v] : cfg.val) v -= left;
    now += left;
  };

  for (std::size_t k = 0; k < w.actions.size(); ++k) {
    window(w.delays[k], false);
    discrete(w.actions[k]);
  }
  window(w.delays.back(), true);
  run.total = now;
  run.end = cfg;
  return run;
}

// ── Constraint systems ───────────────────────────────────────────────────────

namespace {

struct ConstraintWalk {
  DelayConstraintSystem sys;
  std::vector<int> cause;  // cause[k] = position of the cause of a timeout at k
};

// Tracks, per active timer, the position and constant of its last (re)start
// (its engagement). The final action may be a timeout with no edge in m: a
// probe for whether that timeout could happen, used for symbolic wait-style
// questions about undefined extensions.
ConstraintWalk constraint_walk(const Mmt& m, const std::vector<Action>& word) {
  ConstraintWalk cw;
  const int n = static_cast<int>(word.size());
  cw.sys.n = n;
  cw.cause.assign(n + 1, 0);
  auto add = [&](int k, int j, long long b, bool strict) {
    cw.sys.constraints.push_back({k, j, b, strict});
  };
  for (int k = 0; k <= n; ++k) add(k, k + 1, 0, true);  // positive delays

  std::map<std::string, std::pair<int, long long>> eng;
  std::string q = m.initial;
  for (int k = 1; k <= n; ++k) {
    const Action& a = word[k - 1];
    if (a.is_input()) cw.sys.frac_distinct.push_back(k);
    if (a.is_timeout()) {
      auto it = eng.find(a.name);
      if (it == eng.end())
        throw std::invalid_argument("timeout of " + a.name +
                                    " without an in-run start at position " +
                                    std::to_string(k));
      auto [j, c] = it->second;
      cw.cause[k] = j;
      add(k, j, c, false);
      add(j, k, -c, false);
      // Race-freeness: every other active timer stays strictly positive.
      for (const auto& [z, e] : eng)
        if (z != a.name) add(k, e.first, e.second, true);
    }
    const Transition* t = m.find(q, a);
    if (!t) {
      if (k == n && a.is_timeout()) {
        eng.erase(a.name);  // consumed by its spanning equality
        break;
      }
      throw std::invalid_argument("no transition from " + q + " on " + to_string(a));
    }
    const auto& chi = m.active_of(t->to);
    Update started = t->update;
    if (started && !chi.count(started->timer)) started.reset();  // vacuous start

    std::map<std::string, std::pair<int, long long>> next;
    for (const auto& [z, e] : eng) {
      if (a.is_timeout() && z == a.name) {
        if (started && started->timer == z)
          next[z] = {k, started->value};
        else if (chi.count(z))
          next[z] = e;  // expired but kept active: time is frozen until it goes
        continue;
      }
      if (started && started->timer == z) {
        add(k, e.first, e.second, true);  // restarted strictly before expiring
        next[z] = {k, started->value};
        continue;
      }
      if (!chi.count(z)) {
        add(k, e.first, e.second, true);  // stopped strictly before expiring
        continue;
      }
      next[z] = e;
    }
    if (started && !eng.count(started->timer))
      next[started->timer] = {k, started->value};
    eng = std::move(next);
    q = t->to;
  }
  // Whatever is still running must not reach zero by the end of the run.
  for (const auto& [z, e] : eng) add(n + 1, e.first, e.second, true);
  return cw;
}

// Lexicographic weights c - s*eps: sums track the strictness count.
struct Weight {
  long long v = 0;
  long long s = 0;
};
Weight operator+(Weight a, Weight b) { return {a.v + b.v, a.s + b.s}; }
bool weight_less(Weight a, Weight b) {
  return a.v < b.v || (a.v == b.v && a.s > b.s);
}

struct Edge {
  int from, to;
  Weight w;
};

std::vector<Edge> edges_of(const DelayConstraintSystem& sys) {
  std::vector<Edge> es;
  es.reserve(sys.constraints.size());
  for (const auto& c : sys.constraints)
    es.push_back({c.j, c.k, {c.bound, c.strict ? 1LL : 0LL}});
  return es;
}

}  // namespace

DelayConstraintSystem constraints_of(const Mmt& m, const std::vector<Action>& word) {
  return constraint_walk(m, word).sys;
}

DelayConstraintSystem constraints_of(const Mmt& m, const Run& r) {
  if (r.start != m.initial)
    throw std::invalid_argument("constraint systems are built for runs from the initial state");
  return constraints_of(m, r.word());
}

bool satisfiable(const DelayConstraintSystem& sys) {
  const int V = sys.n + 2;
  auto es = edges_of(sys);
  std::vector<Weight> dist(V, Weight{});
  for (int round = 0; round < V; ++round) {
    bool changed = false;
    for (const auto& e : es) {
      Weight cand = dist[e.from] + e.w;
      if (weight_less(cand, dist[e.to])) {
        dist[e.to] = cand;
        changed = true;
      }
    }
    if (!changed) return true;
  }
  for (const auto& e : es)
    if (weight_less(dist[e.from] + e.w, dist[e.to])) return false;
  return true;
}

bool is_feasible(const Mmt& m, const std::vector<Action>& word) {
  return satisfiable(constraints_of(m, word));
}

bool is_feasible(const Mmt& m, const Run& r) {
  return satisfiable(constraints_of(m, r));
}

std::optional<std::vector<Rat>> solve_earliest(const DelayConstraintSystem& sys) {
  if (!satisfiable(sys)) return std::nullopt;
  const int V = sys.n + 2;
  auto es = edges_of(sys);
  // Shortest path from each variable to s_0 = shortest from 0 over reversed
  // edges; the pointwise-minimal solution is its negation.
  constexpr long long kInf = (1LL << 62);
  std::vector<Weight> dist(V, Weight{kInf, 0});
  dist[0] = Weight{};
  for (int round = 0; round < V; ++round) {
    bool changed = false;
    for (const auto& e : es) {
      if (dist[e.to].v >= kInf) continue;
      Weight cand = dist[e.to] + e.w;
      if (weight_less(cand, dist[e.from])) {
        dist[e.from] = cand;
        changed = true;
      }
    }
    if (!changed) break;
  }
  // Strictness counts along shortest paths stay below V; this slack keeps
  // every strict inequality strict after substituting a concrete epsilon.
  const Rat eps(1, 2 * (V + 1));
  std::vector<Rat> sol(V);
  for (int v = 0; v < V; ++v) {
    if (dist[v].v >= kInf)
      throw std::logic_error("constraint variable unconstrained from below");
    sol[v] = Rat(-dist[v].v) + Rat(dist[v].s) * eps;
  }
  return sol;
}

std::optional<TimedRun> synth_transparent(const Mmt& m, const Run& r) {
  if (r.start != m.initial)
    throw std::invalid_argument("synthesis starts at the initial state");
  auto word = r.word();
  if (!run(m, m.initial, word))
    throw std::invalid_argument("run does not exist in the machine");
  auto cw = constraint_walk(m, word);
  auto base = solve_earliest(cw.sys);
  if (!base) return std::nullopt;
  const int n = cw.sys.n;
  auto& s = *base;

  // Root input of each position's cause chain: a timeout happens an integer
  // after its root input, so perturbing roots moves whole chains together.
  std::vector<int> root(n + 2, 0);
  std::map<int, int> input_rank;  // position -> 1-based rank among inputs
  for (int k = 1; k <= n; ++k) {
    if (word[k - 1].is_input()) {
      root[k] = k;
      input_rank[k] = static_cast<int>(input_rank.size()) + 1;
    } else {
      root[k] = root[cw.cause[k]];
    }
  }
  const int m_in = static_cast<int>(input_rank.size());

  // Minimum slack of the strict constraints bounds the perturbation.
  Rat slack;
  bool first = true;
  for (const auto& c : cw.sys.constraints) {
    if (!c.strict) continue;
    Rat gap = Rat(c.bound) - (s[c.k] - s[c.j]);
    if (first || gap < slack) slack = gap, first = false;
  }
  if (first || slack <= Rat(0))
    throw std::logic_error("base solution leaves no slack on strict constraints");

  // eps2 = 1/(L*K): L clears all denominators so fractional parts of input
  // times can only collide when K divides a rank difference; K > m_in rules
  // that out, and the size cap keeps every perturbed constraint slack.
  long long L = 1;
  for (int v = 0; v < n + 2; ++v) L = std::lcm(L, s[v].denominator());
  Rat need = Rat(2 * (m_in + 2)) / (slack * Rat(L));
  long long K = std::max<long long>(m_in + 1, -floor_rat(-need));
  const Rat eps2(1, L * K);

  auto shift = [&](int v) -> Rat {
    if (v == 0) return Rat(0);
    if (v == n + 1) return Rat(m_in + 1) * eps2;
    int rt = root[v];
    return rt == 0 ? Rat(0) : Rat(input_rank.at(rt)) * eps2;
  };
  TimedWord tw;
  tw.actions = word;
  for (int k = 0; k <= n; ++k)
    tw.delays.push_back((s[k + 1] + shift(k + 1)) - (s[k] + shift(k)));

  auto timed = run_timed_word(m, tw);
  if (!timed || !(timed->untime().word() == word) || !race_free(m, *timed) ||
      !distinct_input_fractions(*timed))
    throw std::logic_error("synthesized run fails its own guarantees");
  return timed;
}

bool race_free(const Mmt& m, const TimedRun& run) {
  (void)m;
  Configuration cfg = run.start;
  Rat prev = 0;
  auto zeros_at = [&](const Rat& t) {
    std::set<std::string> zs;
    for (const auto& [x, v] : cfg.val)
      if (v == t - prev) zs.insert(x);
    return zs;
  };
  for (const auto& e : run.events) {
    auto zs = zeros_at(e.time);
    if (e.action.is_timeout()) {
      if (zs != std::set<std::string>{e.action.name}) return false;
    } else if (!zs.empty()) {
      return false;
    }
    cfg = e.after;
    prev = e.time;
  }
  return zeros_at(run.total).empty();
}

bool distinct_input_fractions(const TimedRun& run) {
  std::set<Rat> fracs;
  std::size_t count = 0;
  for (const auto& e : run.events) {
    if (!e.action.is_input()) continue;
    fracs.insert(frac_part(e.time));
    ++count;
  }
  return fracs.size() == count;
}

}  // namespace mmt
