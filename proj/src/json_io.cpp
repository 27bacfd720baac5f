#include "mmt/json_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mmt {

namespace {

using json = nlohmann::ordered_json;

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("failed to write: " + path);
}

std::vector<std::string> string_list(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_array())
    throw std::runtime_error("missing or non-array field: " + key);
  std::vector<std::string> out;
  for (const auto& e : j[key]) {
    if (!e.is_string()) throw std::runtime_error("non-string entry in: " + key);
    out.push_back(e.get<std::string>());
  }
  return out;
}

Action parse_action(const json& j) {
  if (!j.is_object() || j.size() != 1)
    throw std::runtime_error("action must be {\"input\": ...} or {\"timeout\": ...}");
  if (j.contains("input")) return Action::in(j["input"].get<std::string>());
  if (j.contains("timeout")) return Action::to(j["timeout"].get<std::string>());
  throw std::runtime_error("action must be {\"input\": ...} or {\"timeout\": ...}");
}

json action_json(const Action& a) {
  json j;
  if (a.is_input())
    j["input"] = a.name;
  else
    j["timeout"] = a.name;
  return j;
}

// Shared skeleton of Mmt and Gmmt files; the update field differs.
template <typename Machine, typename Tr>
void parse_skeleton(const json& j, Machine& m,
                    std::map<std::pair<std::string, Action>, Tr>& delta,
                    Tr (*parse_transition)(const json&)) {
  m.timers = string_list(j, "timers");
  m.inputs = string_list(j, "inputs");
  m.outputs = string_list(j, "outputs");
  if (!j.contains("states") || !j["states"].is_array())
    throw std::runtime_error("missing or non-array field: states");
  for (const auto& s : j["states"]) {
    if (!s.is_object() || !s.contains("id"))
      throw std::runtime_error("state entries must be {\"id\": ..., \"active\": [...]}");
    std::string id = s["id"].get<std::string>();
    m.states.push_back(id);
    std::set<std::string> chi;
    if (s.contains("active"))
      for (const auto& x : s["active"]) chi.insert(x.get<std::string>());
    if (!m.active.emplace(id, std::move(chi)).second)
      throw std::runtime_error("duplicate state id: " + id);
  }
  if (!j.contains("initial")) throw std::runtime_error("missing field: initial");
  m.initial = j["initial"].get<std::string>();
  if (!j.contains("transitions") || !j["transitions"].is_array())
    throw std::runtime_error("missing or non-array field: transitions");
  for (const auto& t : j["transitions"]) {
    std::string from = t.at("from").get<std::string>();
    Action a = parse_action(t.at("action"));
    Tr tr = parse_transition(t);
    if (!delta.emplace(std::make_pair(from, a), std::move(tr)).second)
      throw std::runtime_error("duplicate transition: (" + from + ", " + to_string(a) + ")");
  }
}

Transition parse_mmt_transition(const json& t) {
  Transition tr;
  tr.to = t.at("to").get<std::string>();
  tr.output = t.at("output").get<std::string>();
  const auto& u = t.at("update");
  if (u.is_null()) {
    tr.update = std::nullopt;
  } else {
    if (!u.is_object() || !u.contains("timer") || !u.contains("value"))
      throw std::runtime_error("update must be null or {\"timer\": ..., \"value\": ...}");
    tr.update = Start{u["timer"].get<std::string>(), u["value"].get<int>()};
  }
  return tr;
}

GTransition parse_gmmt_transition(const json& t) {
  GTransition tr;
  tr.to = t.at("to").get<std::string>();
  tr.output = t.at("output").get<std::string>();
  const auto& u = t.at("update");
  if (!u.is_object() || !u.contains("renames") || !u.contains("start"))
    throw std::runtime_error("gMMT update must be {\"renames\": {...}, \"start\": ...}");
  for (const auto& [dest, src] : u["renames"].items())
    tr.update.renames[dest] = src.get<std::string>();
  if (!u["start"].is_null()) {
    const auto& s = u["start"];
    tr.update.start = Start{s.at("timer").get<std::string>(), s.at("value").get<int>()};
  }
  return tr;
}

template <typename Machine>
json skeleton_json(const Machine& m) {
  json j;
  j["timers"] = m.timers;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["states"] = json::array();
  for (const auto& q : m.states) {
    json s;
    s["id"] = q;
    s["active"] = json::array();
    auto it = m.active.find(q);
    if (it != m.active.end()) {
      // Active sets serialize in timer declaration order.
      for (const auto& x : m.timers)
        if (it->second.count(x)) s["active"].push_back(x);
      for (const auto& x : it->second)
        if (m.timer_index(x) < 0) s["active"].push_back(x);
    }
    j["states"].push_back(std::move(s));
  }
  j["initial"] = m.initial;
  return j;
}

// Transitions in (state declaration, global action) order.
template <typename Machine, typename Emit>
json transitions_json(const Machine& m, Emit emit) {
  json arr = json::array();
  auto actions = m.global_actions();
  for (const auto& q : m.states) {
    for (const auto& a : actions) {
      const auto* t = m.find(q, a);
      if (!t) continue;
      json e;
      e["from"] = q;
      e["action"] = action_json(a);
      e["to"] = t->to;
      e["output"] = t->output;
      e["update"] = emit(*t);
      arr.push_back(std::move(e));
    }
  }
  return arr;
}

std::string quote_dot(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Mmt parse_mmt(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed JSON: ") + e.what());
  }
  Mmt m;
  parse_skeleton(j, m, m.delta, parse_mmt_transition);
  return m;
}

Mmt load_mmt(const std::string& path) {
  Mmt m;
  json j = read_file(path);
  parse_skeleton(j, m, m.delta, parse_mmt_transition);
  return m;
}

std::string dump_mmt(const Mmt& m) {
  json j = skeleton_json(m);
  j["transitions"] = transitions_json(m, [](const Transition& t) {
    json u;
    if (!t.update) return json(nullptr);
    u["timer"] = t.update->timer;
    u["value"] = t.update->value;
    return u;
  });
  return j.dump(2) + "\n";
}

void save_mmt(const Mmt& m, const std::string& path) { write_file(path, dump_mmt(m)); }

Gmmt parse_gmmt(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed JSON: ") + e.what());
  }
  Gmmt g;
  parse_skeleton(j, g, g.delta, parse_gmmt_transition);
  return g;
}

Gmmt load_gmmt(const std::string& path) {
  Gmmt g;
  json j = read_file(path);
  parse_skeleton(j, g, g.delta, parse_gmmt_transition);
  return g;
}

std::string dump_gmmt(const Gmmt& g) {
  json j = skeleton_json(g);
  j["transitions"] = transitions_json(g, [&](const GTransition& t) {
    json u;
    u["renames"] = json::object();
    // Rename keys in timer declaration order for byte-stable output.
    for (const auto& x : g.timers)
      if (auto it = t.update.renames.find(x); it != t.update.renames.end())
        u["renames"][x] = it->second;
    for (const auto& [dest, src] : t.update.renames)
      if (g.timer_index(dest) < 0) u["renames"][dest] = src;
    if (t.update.start) {
      u["start"] = {{"timer", t.update.start->timer}, {"value", t.update.start->value}};
    } else {
      u["start"] = nullptr;
    }
    return u;
  });
  return j.dump(2) + "\n";
}

void save_gmmt(const Gmmt& g, const std::string& path) { write_file(path, dump_gmmt(g)); }

std::string mmt_to_dot(const Mmt& m) {
  std::ostringstream os;
  os << "digraph mmt {\n  rankdir=LR;\n  node [shape=circle];\n";
  os << "  __start [shape=point];\n  __start -> " << quote_dot(m.initial) << ";\n";
  for (const auto& q : m.states) {
    std::string chi;
    for (const auto& x : m.timers)
      if (m.active_of(q).count(x)) chi += (chi.empty() ? "" : ",") + x;
    os << "  " << quote_dot(q) << " [label=" << quote_dot(q + "\n{" + chi + "}") << "];\n";
  }
  for (const auto& q : m.states) {
    for (const auto& a : m.global_actions()) {
      const auto* t = m.find(q, a);
      if (!t) continue;
      std::string label = to_string(a) + "/" + t->output;
      if (t->update)
        label += ", " + t->update->timer + ":=" + std::to_string(t->update->value);
      os << "  " << quote_dot(q) << " -> " << quote_dot(t->to)
         << " [label=" << quote_dot(label) << "];\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string gmmt_to_dot(const Gmmt& g) {
  std::ostringstream os;
  os << "digraph gmmt {\n  rankdir=LR;\n  node [shape=circle];\n";
  os << "  __start [shape=point];\n  __start -> " << quote_dot(g.initial) << ";\n";
  for (const auto& q : g.states) {
    std::string chi;
    for (const auto& x : g.timers)
      if (g.active_of(q).count(x)) chi += (chi.empty() ? "" : ",") + x;
    os << "  " << quote_dot(q) << " [label=" << quote_dot(q + "\n{" + chi + "}") << "];\n";
  }
  for (const auto& q : g.states) {
    for (const auto& a : g.global_actions()) {
      const auto* t = g.find(q, a);
      if (!t) continue;
      std::string label = to_string(a) + "/" + t->output;
      for (const auto& x : g.timers)
        if (auto it = t->update.renames.find(x); it != t->update.renames.end())
          label += ", " + x + ":=" + it->second;
      if (t->update.start)
        label += ", " + t->update.start->timer + ":=" +
                 std::to_string(t->update.start->value);
      os << "  " << quote_dot(q) << " -> " << quote_dot(t->to)
         << " [label=" << quote_dot(label) << "];\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace mmt
