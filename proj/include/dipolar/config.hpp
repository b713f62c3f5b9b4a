#pragma once

// Run configuration: plain data plus range validation. Parsing from text
// lives in config_yaml.hpp.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dipolar/core.hpp"
#include "dipolar/lattice.hpp"
#include "dipolar/levels.hpp"

namespace dipolar {

enum class Solver { kEd, kGsm, kXy, kSwa, kDtwa, kCumulant };

inline const char* solver_name(Solver s) {
  switch (s) {
    case Solver::kEd: return "ed";
    case Solver::kGsm: return "gsm";
    case Solver::kXy: return "xy";
    case Solver::kSwa: return "swa";
    case Solver::kDtwa: return "dtwa";
    case Solver::kCumulant: return "cumulant";
  }
  return "?";
}

inline bool parse_solver(const std::string& s, Solver& out) {
  for (Solver v : {Solver::kEd, Solver::kGsm, Solver::kXy, Solver::kSwa, Solver::kDtwa, Solver::kCumulant}) {
    if (s == solver_name(v)) {
      out = v;
      return true;
    }
  }
  return false;
}

inline const char* pulse_name(PulseShape p) {
  switch (p) {
    case PulseShape::kAlwaysOn: return "always_on";
    case PulseShape::kOffInRegimeI: return "off_in_regime_i";
    case PulseShape::kOffInRegimeII: return "off_in_regime_ii";
  }
  return "?";
}

inline bool parse_pulse(const std::string& s, PulseShape& out) {
  for (PulseShape v : {PulseShape::kAlwaysOn, PulseShape::kOffInRegimeI, PulseShape::kOffInRegimeII}) {
    if (s == pulse_name(v)) {
      out = v;
      return true;
    }
  }
  return false;
}

inline const std::vector<std::string>& known_level_schemes() {
  static const std::vector<std::string> names{"two_level", "four_level", "sr88"};
  return names;
}

inline LevelScheme level_scheme_by_name(const std::string& name) {
  if (name == "two_level") return LevelScheme::two_level();
  if (name == "four_level") return LevelScheme::four_level();
  if (name == "sr88") return LevelScheme::sr88_four_level();
  throw ConfigError("unknown level scheme '" + name + "'");
}

inline const std::vector<std::string>& known_observables() {
  static const std::vector<std::string> names{"excited", "population", "negativity", "renyi2", "toth",
                                              "sx",      "nk",         "p2",         "squeezing", "xi2"};
  return names;
}

struct GeometryConfig {
  int dim = 1;            ///< 1: chain along X, 2: square lattice in the X-Z plane
  int n = 2;              ///< atoms (dim 1) or atoms per side (dim 2)
  Real spacing = 0.1;     ///< in units of lambda
  bool periodic = false;  ///< minimum-image couplings (swa and dtwa always use this)
  [[nodiscard]] int n_atoms() const { return dim == 1 ? n : n * n; }
};

struct DriveConfig {
  Real rabi = 0.1;
  Real detuning = -3.0;
  Real theta = 0.0;  ///< tilt of the pi polarization from Z towards X, radians
  PulseShape pulse = PulseShape::kAlwaysOn;
  Real t_off = 0.0;
};

struct TimeConfig {
  Real t_end = 100.0;
  int steps = 101;     ///< grid points including t = 0
  bool in_tau = false; ///< t_end given in units of tau = 0.04 Delta^2 / Omega^2
};

struct EdConfig {
  int max_excitations = -1;  ///< -1 keeps the full space
  Real rtol = 1e-8;
  Real atol = 1e-10;
};

struct DtwaConfig {
  std::size_t n_traj = 10000;
  std::vector<std::array<int, 2>> modes;  ///< (nx, nz); empty = all grid modes
};

struct ScanConfig {
  std::string parameter;  ///< "", "detuning", "rabi" or "theta"
  std::vector<Real> values;
};

struct RunConfig {
  std::string name = "run";
  Solver solver = Solver::kGsm;
  std::string levels = "four_level";
  GeometryConfig geometry;
  DriveConfig drive;
  TimeConfig time;
  std::vector<std::string> observables{"negativity"};
  std::vector<int> subsystem;  ///< empty = central atom
  bool dissipation = true;     ///< xy and cumulant tiers
  EdConfig ed;
  DtwaConfig dtwa;
  ScanConfig scan;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string output_dir = ".";

  [[nodiscard]] Real tau() const { return 0.04 * drive.detuning * drive.detuning / (drive.rabi * drive.rabi); }
  [[nodiscard]] Real t_end_gamma() const { return time.in_tau ? time.t_end * tau() : time.t_end; }
  [[nodiscard]] std::vector<Real> time_grid() const {
    std::vector<Real> g(static_cast<std::size_t>(time.steps));
    const Real te = t_end_gamma();
    for (int i = 0; i < time.steps; ++i) g[static_cast<std::size_t>(i)] = te * i / (time.steps - 1);
    return g;
  }
};

/// Every range violation in the config (empty when valid).
inline std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> e;
  auto need = [&e](bool ok, const std::string& msg) {
    if (!ok) e.push_back(msg);
  };
  need(!c.name.empty(), "name: must not be empty");
  need(c.geometry.dim == 1 || c.geometry.dim == 2, "geometry.dim: must be 1 or 2");
  need(c.geometry.n >= 1, "geometry.n: must be >= 1");
  need(c.geometry.spacing > 0.0, "geometry.spacing: must be > 0");
  need(c.drive.rabi > 0.0, "drive.rabi: must be > 0");
  need(std::isfinite(c.drive.detuning), "drive.detuning: must be finite");
  need(std::isfinite(c.drive.theta), "drive.theta: must be finite");
  need(c.drive.t_off >= 0.0, "drive.t_off: must be >= 0");
  need(c.drive.pulse == PulseShape::kAlwaysOn || c.drive.t_off > 0.0, "drive.t_off: switch-off pulses need t_off > 0");
  need(c.time.t_end > 0.0, "time.t_end: must be > 0");
  need(c.time.steps >= 2, "time.steps: must be >= 2");
  need(!c.time.in_tau || c.drive.detuning != 0.0, "time.in_tau: needs a nonzero detuning");
  need(c.ed.max_excitations == -1 || c.ed.max_excitations >= 1, "ed.max_excitations: must be -1 (full space) or >= 1");
  need(c.ed.rtol > 0.0 && c.ed.rtol < 1.0, "ed.rtol: must be in (0, 1)");
  need(c.ed.atol > 0.0, "ed.atol: must be > 0");
  need(c.dtwa.n_traj >= 1, "dtwa.n_traj: must be >= 1");
  need(c.threads >= 1, "threads: must be >= 1");
  bool known_levels = false;
  for (const auto& n : known_level_schemes()) known_levels = known_levels || n == c.levels;
  need(known_levels, "levels: unknown scheme '" + c.levels + "'");
  for (const auto& o : c.observables) {
    bool ok = false;
    for (const auto& n : known_observables()) ok = ok || n == o;
    need(ok, "observables: unknown observable '" + o + "'");
  }
  const int n_atoms = c.geometry.n_atoms();
  for (int s : c.subsystem) need(s >= 0 && s < n_atoms, "subsystem: site " + std::to_string(s) + " out of range");
  if (!c.subsystem.empty()) need(static_cast<int>(c.subsystem.size()) < n_atoms, "subsystem: must leave a nonempty complement");
  const bool spin_half_tier = c.solver == Solver::kXy || c.solver == Solver::kSwa || c.solver == Solver::kDtwa ||
                              c.solver == Solver::kCumulant;
  if (spin_half_tier) need(c.drive.detuning != 0.0, "drive.detuning: the spin-1/2 tiers need a nonzero detuning");
  if (c.solver == Solver::kSwa || c.solver == Solver::kDtwa) {
    for (const auto& m : c.dtwa.modes) {
      const int l = c.geometry.n;
      need(m[0] >= 0 && m[0] < l && m[1] >= 0 && m[1] < (c.geometry.dim == 2 ? l : 1),
           "dtwa.modes: (" + std::to_string(m[0]) + ", " + std::to_string(m[1]) + ") is off the reciprocal grid");
    }
  }
  if (!c.scan.parameter.empty()) {
    need(c.scan.parameter == "detuning" || c.scan.parameter == "rabi" || c.scan.parameter == "theta",
         "scan.parameter: must be detuning, rabi or theta");
    need(!c.scan.values.empty(), "scan.values: must not be empty");
    if (c.scan.parameter == "rabi") {
      for (Real v : c.scan.values) need(v > 0.0, "scan.values: rabi values must be > 0");
    }
  }
  return e;
}

}  // namespace dipolar
