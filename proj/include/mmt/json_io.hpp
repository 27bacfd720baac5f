// json_io.hpp
// JSON (de)serialization for MMTs and gMMTs, plus Graphviz export.
#pragma once

#include "mmt/core.hpp"
#include "mmt/gmmt.hpp"

#include <string>

namespace mmt {

/// Canonical machine format:
/// {
///   "timers": [...], "inputs": [...], "outputs": [...],
///   "states": [{"id": "q0", "active": []}, ...],
///   "initial": "q0",
///   "transitions": [{"from": "q0", "action": {"input": "i"}, "to": "q1",
///                    "output": "o", "update": {"timer": "x", "value": 2}},
///                   {..., "action": {"timeout": "x"}, "update": null}]
/// }
/// gMMT files use the same shape with
///   "update": {"renames": {"y": "x", ...}, "start": {"timer":"x","value":2}|null}.
/// Serialization is deterministic: fixed key order, states in declaration
/// order, transitions ordered by (state, global action order).

Mmt load_mmt(const std::string& path);
Mmt parse_mmt(const std::string& json_text);
std::string dump_mmt(const Mmt& m);
void save_mmt(const Mmt& m, const std::string& path);

Gmmt load_gmmt(const std::string& path);
Gmmt parse_gmmt(const std::string& json_text);
std::string dump_gmmt(const Gmmt& g);
void save_gmmt(const Gmmt& g, const std::string& path);

/// Graphviz digraph; states annotated with their active-timer sets.
std::string mmt_to_dot(const Mmt& m);
std::string gmmt_to_dot(const Gmmt& g);

}  // namespace mmt
