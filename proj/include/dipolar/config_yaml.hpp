#pragma once

// YAML front end for RunConfig. Requires yaml-cpp.
//
// A config may name a preset (`preset: fig3`); its runs are loaded first and
// the remaining keys are merged over each of them. Dotted overrides
// ("dtwa.n_traj=2000") are applied last.

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "dipolar/config.hpp"
#include "dipolar/presets.hpp"

namespace dipolar {

/// All problems found in a config, reported together.
class ConfigErrors : public ConfigError {
 public:
  explicit ConfigErrors(std::vector<std::string> errors) : ConfigError(join(errors)), errors_(std::move(errors)) {}
  [[nodiscard]] const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& e) {
    std::string s = "invalid configuration:";
    for (const auto& x : e) s += "\n  " + x;
    return s;
  }
  std::vector<std::string> errors_;
};

class UnknownPreset : public Error {
 public:
  explicit UnknownPreset(const std::string& name) : Error("unknown preset '" + name + "'") {}
};

namespace yaml_detail {

inline YAML::Node merge(const YAML::Node& base, const YAML::Node& over) {
  if (!over.IsMap() || !base.IsMap()) return YAML::Clone(over);
  YAML::Node out = YAML::Clone(base);
  for (const auto& kv : over) {
    const auto key = kv.first.as<std::string>();
    out[key] = out[key] ? merge(out[key], kv.second) : YAML::Clone(kv.second);
  }
  return out;
}

class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  // Checks that `node` only has keys from `allowed`.
  void keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
    if (!node) return;
    if (!node.IsMap()) {
      errors_.push_back(path + ": expected a mapping");
      return;
    }
    for (const auto& kv : node) {
      const auto k = kv.first.as<std::string>();
      if (!allowed.count(k)) errors_.push_back((path.empty() ? "" : path + ".") + k + ": unknown key");
    }
  }

  template <class T>
  void get(const YAML::Node& node, const std::string& key, const std::string& path, T& out) {
    if (!node || !node.IsMap() || !node[key]) return;
    try {
      out = node[key].as<T>();
    } catch (const YAML::Exception&) {
      errors_.push_back(path + key + ": type mismatch");
    }
  }

  void error(const std::string& e) { errors_.push_back(e); }

 private:
  std::vector<std::string>& errors_;
};

inline RunConfig to_config(const YAML::Node& root, std::vector<std::string>& errors) {
  Reader r(errors);
  RunConfig c;
  if (!root || !root.IsMap()) {
    errors.push_back("config: expected a mapping at top level");
    return c;
  }
  r.keys(root, "", {"name", "solver", "levels", "geometry", "drive", "time", "observables", "subsystem", "dissipation",
                    "ed", "dtwa", "scan", "seed", "threads", "output_dir"});
  r.get(root, "name", "", c.name);
  if (root["solver"]) {
    std::string s;
    r.get(root, "solver", "", s);
    if (!s.empty() && !parse_solver(s, c.solver)) errors.push_back("solver: unknown solver '" + s + "'");
  } else {
    errors.push_back("solver: missing required key");
  }
  r.get(root, "levels", "", c.levels);
  r.get(root, "observables", "", c.observables);
  r.get(root, "subsystem", "", c.subsystem);
  r.get(root, "dissipation", "", c.dissipation);
  r.get(root, "seed", "", c.seed);
  r.get(root, "threads", "", c.threads);
  r.get(root, "output_dir", "", c.output_dir);

  const YAML::Node g = root["geometry"];
  if (g) {
    r.keys(g, "geometry", {"dim", "n", "spacing", "periodic"});
    r.get(g, "dim", "geometry.", c.geometry.dim);
    r.get(g, "n", "geometry.", c.geometry.n);
    r.get(g, "spacing", "geometry.", c.geometry.spacing);
    r.get(g, "periodic", "geometry.", c.geometry.periodic);
  } else {
    errors.push_back("geometry: missing required key");
  }
  const YAML::Node d = root["drive"];
  if (d) {
    r.keys(d, "drive", {"rabi", "detuning", "theta", "pulse", "t_off"});
    r.get(d, "rabi", "drive.", c.drive.rabi);
    r.get(d, "detuning", "drive.", c.drive.detuning);
    r.get(d, "theta", "drive.", c.drive.theta);
    r.get(d, "t_off", "drive.", c.drive.t_off);
    std::string p;
    r.get(d, "pulse", "drive.", p);
    if (!p.empty() && !parse_pulse(p, c.drive.pulse)) errors.push_back("drive.pulse: unknown pulse shape '" + p + "'");
  } else {
    errors.push_back("drive: missing required key");
  }
  const YAML::Node t = root["time"];
  if (t) {
    r.keys(t, "time", {"t_end", "steps", "in_tau"});
    r.get(t, "t_end", "time.", c.time.t_end);
    r.get(t, "steps", "time.", c.time.steps);
    r.get(t, "in_tau", "time.", c.time.in_tau);
  } else {
    errors.push_back("time: missing required key");
  }
  const YAML::Node e = root["ed"];
  r.keys(e, "ed", {"max_excitations", "rtol", "atol"});
  r.get(e, "max_excitations", "ed.", c.ed.max_excitations);
  r.get(e, "rtol", "ed.", c.ed.rtol);
  r.get(e, "atol", "ed.", c.ed.atol);
  const YAML::Node w = root["dtwa"];
  r.keys(w, "dtwa", {"n_traj", "modes"});
  r.get(w, "n_traj", "dtwa.", c.dtwa.n_traj);
  if (w && w["modes"]) {
    try {
      for (const auto& m : w["modes"]) {
        const auto v = m.as<std::vector<int>>();
        if (v.size() != 2) {
          errors.push_back("dtwa.modes: each mode is a pair [nx, nz]");
          continue;
        }
        c.dtwa.modes.push_back({v[0], v[1]});
      }
    } catch (const YAML::Exception&) {
      errors.push_back("dtwa.modes: type mismatch");
    }
  }
  const YAML::Node s = root["scan"];
  r.keys(s, "scan", {"parameter", "values", "from", "to", "count"});
  if (s && s.IsMap()) {
    r.get(s, "parameter", "scan.", c.scan.parameter);
    r.get(s, "values", "scan.", c.scan.values);
    if (s["from"] || s["to"] || s["count"]) {
      Real from = 0.0, to = 0.0;
      int count = 0;
      r.get(s, "from", "scan.", from);
      r.get(s, "to", "scan.", to);
      r.get(s, "count", "scan.", count);
      if (count < 1) {
        errors.push_back("scan.count: must be >= 1");
      } else {
        for (int i = 0; i < count; ++i) c.scan.values.push_back(count == 1 ? from : from + (to - from) * i / (count - 1));
      }
    }
  }
  for (auto& v : validate(c)) errors.push_back(std::move(v));
  return c;
}

/// Sets a dotted path ("dtwa.n_traj") to a YAML scalar/sequence parsed from `value`.
inline void set_path(YAML::Node& root, const std::string& dotted, const std::string& value) {
  std::vector<std::string> parts;
  std::stringstream ss(dotted);
  for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
  if (parts.empty() || dotted.empty()) throw ConfigErrors({"override: empty key"});
  YAML::Node parsed = YAML::Load(value);
  // Walk with fresh handles; yaml-cpp nodes are references into the tree.
  std::vector<YAML::Node> chain{root};
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node next = chain.back()[parts[i]];
    if (!next.IsDefined() || next.IsNull()) {
      chain.back()[parts[i]] = YAML::Node(YAML::NodeType::Map);
      next = chain.back()[parts[i]];
    }
    chain.push_back(next);
  }
  chain.back()[parts.back()] = parsed;
}

}  // namespace yaml_detail

/// Preset runs as YAML nodes.
inline std::vector<YAML::Node> preset_nodes(const std::string& name) {
  const auto& texts = preset_texts();
  const auto it = texts.find(name);
  if (it == texts.end()) throw UnknownPreset(name);
  const YAML::Node doc = YAML::Load(it->second);
  std::vector<YAML::Node> out;
  for (const auto& run : doc) out.push_back(YAML::Clone(run));
  return out;
}

/// Parses config text (plus "key.path=value" overrides) into one or more runs.
/// Throws ConfigErrors listing every problem, or UnknownPreset.
inline std::vector<RunConfig> parse_config(const std::string& text, const std::vector<std::string>& overrides = {}) {
  YAML::Node root;
  try {
    root = text.empty() ? YAML::Node(YAML::NodeType::Map) : YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigErrors({std::string("syntax: ") + e.what()});
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) throw ConfigErrors({"config: expected a mapping at top level"});
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigErrors({"override '" + o + "': expected key=value"});
    try {
      yaml_detail::set_path(root, o.substr(0, eq), o.substr(eq + 1));
    } catch (const YAML::Exception& e) {
      throw ConfigErrors({"override '" + o + "': " + e.what()});
    }
  }
  std::vector<YAML::Node> runs;
  if (root["preset"]) {
    std::string name;
    try {
      name = root["preset"].as<std::string>();
    } catch (const YAML::Exception&) {
      throw ConfigErrors({"preset: type mismatch"});
    }
    YAML::Node layer = YAML::Clone(root);
    layer.remove("preset");
    for (const auto& base : preset_nodes(name)) runs.push_back(yaml_detail::merge(base, layer));
  } else {
    runs.push_back(root);
  }
  std::vector<std::string> errors;
  std::vector<RunConfig> out;
  for (const auto& node : runs) {
    std::vector<std::string> e;
    RunConfig c = yaml_detail::to_config(node, e);
    for (auto& x : e) errors.push_back(runs.size() > 1 ? c.name + ": " + x : x);
    out.push_back(std::move(c));
  }
  if (!errors.empty()) throw ConfigErrors(std::move(errors));
  return out;
}

/// Runs of a named preset, with optional overrides.
inline std::vector<RunConfig> preset_config(const std::string& name, const std::vector<std::string>& overrides = {}) {
  return parse_config("preset: " + name + "\n", overrides);
}

/// YAML echo of a config (metadata sidecars, --dump-config).
inline YAML::Node to_yaml(const RunConfig& c) {
  YAML::Node n;
  n["name"] = c.name;
  n["solver"] = solver_name(c.solver);
  n["levels"] = c.levels;
  n["geometry"]["dim"] = c.geometry.dim;
  n["geometry"]["n"] = c.geometry.n;
  n["geometry"]["spacing"] = c.geometry.spacing;
  n["geometry"]["periodic"] = c.geometry.periodic;
  n["drive"]["rabi"] = c.drive.rabi;
  n["drive"]["detuning"] = c.drive.detuning;
  n["drive"]["theta"] = c.drive.theta;
  n["drive"]["pulse"] = pulse_name(c.drive.pulse);
  n["drive"]["t_off"] = c.drive.t_off;
  n["time"]["t_end"] = c.time.t_end;
  n["time"]["steps"] = c.time.steps;
  n["time"]["in_tau"] = c.time.in_tau;
  n["observables"] = c.observables;
  n["subsystem"] = c.subsystem;
  n["dissipation"] = c.dissipation;
  n["ed"]["max_excitations"] = c.ed.max_excitations;
  n["ed"]["rtol"] = c.ed.rtol;
  n["ed"]["atol"] = c.ed.atol;
  n["dtwa"]["n_traj"] = c.dtwa.n_traj;
  YAML::Node modes(YAML::NodeType::Sequence);
  for (const auto& m : c.dtwa.modes) modes.push_back(std::vector<int>{m[0], m[1]});
  n["dtwa"]["modes"] = modes;
  if (!c.scan.parameter.empty()) {
    n["scan"]["parameter"] = c.scan.parameter;
    n["scan"]["values"] = c.scan.values;
  }
  n["seed"] = c.seed;
  n["threads"] = c.threads;
  n["output_dir"] = c.output_dir;
  return n;
}

}  // namespace dipolar
