#pragma once

// CSV result tables and JSON metadata sidecars.

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "dipolar/config.hpp"
#include "dipolar/runner.hpp"

#ifndef DIPOLAR_VERSION
#define DIPOLAR_VERSION "0.1.0"
#endif

namespace dipolar {

inline constexpr const char* kVersion = DIPOLAR_VERSION;

namespace io_detail {

inline std::string number(Real v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace io_detail

/// tau = 0.04 Delta^2 / Omega^2 for a row (scan values replace the configured parameter).
inline Real row_tau(const RunConfig& c, Real param) {
  Real rabi = c.drive.rabi, det = c.drive.detuning;
  if (!std::isnan(param)) {
    if (c.scan.parameter == "rabi") rabi = param;
    if (c.scan.parameter == "detuning") det = param;
  }
  return 0.04 * det * det / (rabi * rabi);
}

inline void write_csv(std::ostream& os, const RunResult& r) {
  os << "# columns: t [1/Gamma], t_tau [t / tau, tau = 0.04 Delta^2/(Gamma Omega^2); empty if Delta = 0], "
        "param [scan value of "
     << (r.config.scan.parameter.empty() ? "none" : r.config.scan.parameter)
     << "], observable, label [mode nx:nz or atom:level], value, error [standard error; empty if exact]\n";
  os << "t,t_tau,param,observable,label,value,error\n";
  for (const auto& row : r.rows) {
    const Real tau = row_tau(r.config, row.param);
    const Real t_tau = tau > 0.0 ? row.t / tau : std::numeric_limits<Real>::quiet_NaN();
    os << io_detail::number(row.t) << ',' << io_detail::number(t_tau) << ',' << io_detail::number(row.param) << ','
       << io_detail::quoted(row.observable) << ',' << io_detail::quoted(row.label) << ',' << io_detail::number(row.value)
       << ',' << io_detail::number(row.error) << '\n';
  }
}

inline nlohmann::json config_json(const RunConfig& c) {
  nlohmann::json j;
  j["name"] = c.name;
  j["solver"] = solver_name(c.solver);
  j["levels"] = c.levels;
  j["geometry"] = {{"dim", c.geometry.dim}, {"n", c.geometry.n}, {"spacing", c.geometry.spacing},
                   {"periodic", c.geometry.periodic}};
  j["drive"] = {{"rabi", c.drive.rabi}, {"detuning", c.drive.detuning}, {"theta", c.drive.theta},
                {"pulse", pulse_name(c.drive.pulse)}, {"t_off", c.drive.t_off}};
  j["time"] = {{"t_end", c.time.t_end}, {"steps", c.time.steps}, {"in_tau", c.time.in_tau}};
  j["observables"] = c.observables;
  j["subsystem"] = c.subsystem;
  j["dissipation"] = c.dissipation;
  j["ed"] = {{"max_excitations", c.ed.max_excitations}, {"rtol", c.ed.rtol}, {"atol", c.ed.atol}};
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& m : c.dtwa.modes) modes.push_back({m[0], m[1]});
  j["dtwa"] = {{"n_traj", c.dtwa.n_traj}, {"modes", modes}};
  if (!c.scan.parameter.empty()) j["scan"] = {{"parameter", c.scan.parameter}, {"values", c.scan.values}};
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["output_dir"] = c.output_dir;
  return j;
}

inline nlohmann::json metadata_json(const RunResult& r, const std::string& csv_name) {
  nlohmann::json j;
  j["config"] = config_json(r.config);
  j["seed"] = r.config.seed;
  j["code_version"] = kVersion;
  j["wall_time_seconds"] = r.wall_seconds;
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  j["finished_utc"] = stamp;
  j["rows"] = r.rows.size();
  j["csv"] = csv_name;
  j["diagnostics"] = r.diagnostics;
  return j;
}

/// Writes <dir>/<name>.csv and <dir>/<name>.json; returns the CSV path.
inline std::filesystem::path write_outputs(const RunResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string base = r.config.name;
  const auto csv = dir / (base + ".csv");
  {
    std::ofstream f(csv);
    if (!f) throw Error("cannot write " + csv.string());
    write_csv(f, r);
  }
  std::ofstream meta(dir / (base + ".json"));
  if (!meta) throw Error("cannot write " + (dir / (base + ".json")).string());
  meta << metadata_json(r, csv.filename().string()).dump(2) << '\n';
  return csv;
}

}  // namespace dipolar
