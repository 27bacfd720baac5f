#include "mmt/gmmt.hpp"

#include "mmt/zones.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace mmt {

const std::set<std::string>& Gmmt::active_of(const std::string& q) const {
  auto it = active.find(q);
  if (it == active.end()) throw std::invalid_argument("unknown state: " + q);
  return it->second;
}

const GTransition* Gmmt::find(const std::string& q, const Action& a) const {
  auto it = delta.find({q, a});
  return it == delta.end() ? nullptr : &it->second;
}

int Gmmt::timer_index(const std::string& x) const {
  auto it = std::find(timers.begin(), timers.end(), x);
  return it == timers.end() ? -1 : static_cast<int>(it - timers.begin());
}

std::vector<Action> Gmmt::global_actions() const {
  std::vector<Action> out;
  for (const auto& i : inputs) out.push_back(Action::in(i));
  for (const auto& x : timers) out.push_back(Action::to(x));
  return out;
}

std::vector<std::string> validate_gmmt(const Gmmt& g) {
  std::vector<std::string> errs;
  auto err = [&](std::string e) { errs.push_back(std::move(e)); };

  auto check_ids = [&](const std::vector<std::string>& ids, const char* what) {
    std::set<std::string> seen;
    for (const auto& id : ids) {
      if (id.empty()) err(std::string("empty ") + what + " id");
      if (!seen.insert(id).second) err(std::string("duplicate ") + what + " id: " + id);
    }
  };
  check_ids(g.timers, "timer");
  check_ids(g.inputs, "input");
  check_ids(g.outputs, "output");
  check_ids(g.states, "state");
  for (const auto& q : g.states)
    if (g.timer_index(q) >= 0) err("state and timer share the id: " + q);

  std::set<std::string> states(g.states.begin(), g.states.end());
  std::set<std::string> timers(g.timers.begin(), g.timers.end());
  std::set<std::string> inputs(g.inputs.begin(), g.inputs.end());
  std::set<std::string> outputs(g.outputs.begin(), g.outputs.end());

  if (!states.count(g.initial)) err("initial state not declared: " + g.initial);
  for (const auto& [q, chi] : g.active) {
    if (!states.count(q)) err("active set for unknown state: " + q);
    for (const auto& x : chi)
      if (!timers.count(x)) err("unknown timer active in " + q + ": " + x);
  }
  for (const auto& q : g.states)
    if (!g.active.count(q)) err("state without an active set: " + q);
  if (errs.empty() && !g.active_of(g.initial).empty())
    err("initial state has active timers");

  if (!errs.empty()) return errs;  // structure broken; skip transition checks

  for (const auto& [key, t] : g.delta) {
    const auto& [q, a] = key;
    std::ostringstream tag;
    tag << "(" << q << ", " << to_string(a) << "): ";
    if (!states.count(q)) {
      err(tag.str() + "unknown source state");
      continue;
    }
    if (!states.count(t.to)) {
      err(tag.str() + "unknown target state");
      continue;
    }
    if (!outputs.count(t.output)) err(tag.str() + "unknown output: " + t.output);
    if (a.is_input() && !inputs.count(a.name))
      err(tag.str() + "unknown input");
    const auto& chi_q = g.active_of(q);
    const auto& chi_t = g.active_of(t.to);

    // Domain of the update is exactly the target's active set.
    for (const auto& x : chi_t)
      if (!t.update.defines(x)) err(tag.str() + "update does not define " + x);
    for (const auto& [dest, src] : t.update.renames) {
      if (!chi_t.count(dest)) err(tag.str() + "rename of inactive target timer " + dest);
      if (!chi_q.count(src)) err(tag.str() + "rename from inactive source timer " + src);
    }
    if (t.update.start) {
      if (!chi_t.count(t.update.start->timer))
        err(tag.str() + "start of inactive target timer " + t.update.start->timer);
      if (t.update.renames.count(t.update.start->timer))
        err(tag.str() + "timer both started and renamed: " + t.update.start->timer);
      if (t.update.start->value < 1) err(tag.str() + "start constant must be >= 1");
    }
    std::set<std::string> sources;
    for (const auto& [dest, src] : t.update.renames)
      if (!sources.insert(src).second)
        err(tag.str() + "rename sources not injective: " + src);

    if (a.is_timeout()) {
      if (!timers.count(a.name)) {
        err(tag.str() + "unknown timer");
        continue;
      }
      if (!chi_q.count(a.name)) err(tag.str() + "timeout of inactive timer");
      if (sources.count(a.name))
        err(tag.str() + "timed-out timer reused as a rename source");
    }
  }
  return errs;
}

void require_valid(const Gmmt& g) {
  auto errs = validate_gmmt(g);
  if (errs.empty()) return;
  std::string msg = "invalid gMMT:";
  for (const auto& e : errs) msg += "\n  - " + e;
  throw std::invalid_argument(msg);
}

GConfig gmmt_initial(const Gmmt& g) {
  if (!g.active_of(g.initial).empty())
    throw std::invalid_argument("initial state has active timers");
  return {g.initial, {}};
}

std::optional<GConfig> gmmt_delay(const Gmmt& g, const GConfig& c, const Rat& d) {
  if (d < Rat(0)) return std::nullopt;
  (void)g;
  GConfig out = c;
  for (auto& [x, v] : out.val) {
    if (v < d) return std::nullopt;
    v -= d;
  }
  return out;
}

std::optional<GStep> gmmt_step(const Gmmt& g, const GConfig& c, const Action& a) {
  if (a.is_timeout()) {
    auto it = c.val.find(a.name);
    if (it == c.val.end() || it->second != Rat(0)) return std::nullopt;
  }
  const GTransition* t = g.find(c.state, a);
  if (!t) return std::nullopt;
  GConfig after;
  after.state = t->to;
  for (const auto& x : g.active_of(t->to)) {
    if (t->update.start && t->update.start->timer == x)
      after.val[x] = Rat(t->update.start->value);
    else
      after.val[x] = c.val.at(t->update.renames.at(x));
  }
  return GStep{t->output, std::move(after)};
}

// ── Conversion ───────────────────────────────────────────────────────────────

namespace {

// mu: gMMT timer -> pool timer, injective, domain chi(state).
using Mu = std::map<std::string, std::string>;

std::string render(const Gmmt& g, const std::string& q, const Mu& mu) {
  std::string s = q + "{";
  bool first = true;
  for (const auto& x : g.timers) {
    auto it = mu.find(x);
    if (it == mu.end()) continue;
    if (!first) s += ",";
    s += x + ":" + it->second;
    first = false;
  }
  return s + "}";
}

}  // namespace

Mmt gmmt_to_mmt(const Gmmt& g) {
  require_valid(g);

  std::size_t pool_size = 0;
  for (const auto& q : g.states) pool_size = std::max(pool_size, g.active_of(q).size());
  std::vector<std::string> pool;
  for (std::size_t i = 1; i <= pool_size; ++i) pool.push_back("x" + std::to_string(i));

  Mmt m;
  m.timers = pool;
  m.inputs = g.inputs;
  m.outputs = g.outputs;

  std::vector<std::pair<std::string, Mu>> pairs;
  std::map<std::string, int> seen;
  auto intern = [&](const std::string& q, Mu mu) {
    std::string name = render(g, q, mu);
    if (auto it = seen.find(name); it != seen.end()) return it->second;
    int id = static_cast<int>(pairs.size());
    seen[name] = id;
    m.states.push_back(name);
    std::set<std::string> chi;
    for (const auto& [x, p] : mu) chi.insert(p);
    m.active[name] = std::move(chi);
    pairs.emplace_back(q, std::move(mu));
    return id;
  };

  int start = intern(g.initial, {});
  m.initial = m.states[start];
  std::deque<int> queue = {start};
  const auto actions = g.global_actions();
  while (!queue.empty()) {
    int cur = queue.front();
    queue.pop_front();
    // Copies: intern() may reallocate `pairs` while expanding this state.
    const std::string q = pairs[cur].first;
    const Mu mu = pairs[cur].second;
    for (const auto& ga : actions) {
      const GTransition* t = g.find(q, ga);
      if (!t) continue;

      Mu nu;  // mu after the renames: survivors keep their pool slot
      for (const auto& [dest, src] : t->update.renames) nu[dest] = mu.at(src);

      Action action = ga;
      Update update;
      if (ga.is_timeout()) {
        const std::string& slot = mu.at(ga.name);
        action = Action::to(slot);
        if (t->update.start) {
          // MMT timeouts may only restart their own timer; the expired pool
          // slot is free for the started timer precisely because the
          // timed-out timer is never a rename source.
          update = Start{slot, t->update.start->value};
          nu[t->update.start->timer] = slot;
        }
      } else if (t->update.start) {
        std::set<std::string> used;
        for (const auto& [x, p] : nu) used.insert(p);
        std::string fresh;
        for (const auto& p : pool)
          if (!used.count(p)) {
            fresh = p;
            break;
          }
        update = Start{fresh, t->update.start->value};
        nu[t->update.start->timer] = fresh;
      }

      bool fresh_state = seen.find(render(g, t->to, nu)) == seen.end();
      int next = intern(t->to, std::move(nu));
      if (fresh_state) queue.push_back(next);
      m.delta[{m.states[cur], action}] = Transition{m.states[next], t->output, update};
    }
  }

  require_valid(m);
  if (!is_complete(m))
    throw std::invalid_argument("gMMT conversion produced an incomplete machine");
  return m;
}

}  // namespace mmt
