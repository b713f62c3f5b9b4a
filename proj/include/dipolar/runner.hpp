#pragma once

// Executes a RunConfig with the requested solver tier and collects
// long-format result rows (time, observable, label, value, error).

#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "dipolar/config.hpp"
#include "dipolar/cumulant.hpp"
#include "dipolar/dtwa.hpp"
#include "dipolar/effective.hpp"
#include "dipolar/full_model.hpp"
#include "dipolar/observables.hpp"
#include "dipolar/spinwave.hpp"
#include "dipolar/xy_model.hpp"

namespace dipolar {

struct ResultRow {
  Real t = 0.0;
  Real param = std::numeric_limits<Real>::quiet_NaN();  ///< scan value, NaN without a scan
  std::string observable;
  std::string label;
  Real value = 0.0;
  Real error = std::numeric_limits<Real>::quiet_NaN();
};

struct RunResult {
  RunConfig config;
  std::vector<ResultRow> rows;
  nlohmann::json diagnostics = nlohmann::json::object();
  Real wall_seconds = 0.0;
};

/// Observables each tier can produce.
inline const std::set<std::string>& supported_observables(Solver s) {
  static const std::set<std::string> ed{"excited", "population", "negativity", "renyi2"};
  static const std::set<std::string> gsm{"population", "negativity", "renyi2", "toth", "sx", "nk", "p2", "squeezing"};
  static const std::set<std::string> xy{"negativity", "renyi2", "toth", "sx", "nk", "p2", "squeezing"};
  static const std::set<std::string> swa{"nk", "p2", "squeezing", "xi2"};
  static const std::set<std::string> dtwa{"nk", "p2", "squeezing", "sx"};
  static const std::set<std::string> cumulant{"toth", "sx", "nk", "p2", "squeezing"};
  switch (s) {
    case Solver::kEd: return ed;
    case Solver::kGsm: return gsm;
    case Solver::kXy: return xy;
    case Solver::kSwa: return swa;
    case Solver::kDtwa: return dtwa;
    case Solver::kCumulant: return cumulant;
  }
  return ed;
}

namespace run_detail {

inline bool wants(const RunConfig& c, const std::string& o) {
  return std::find(c.observables.begin(), c.observables.end(), o) != c.observables.end();
}

inline PeriodicGrid grid_of(const RunConfig& c) {
  return {c.geometry.n, c.geometry.dim == 2 ? c.geometry.n : 1, c.geometry.spacing};
}

inline ArrayGeometry geometry_of(const RunConfig& c) {
  if (c.geometry.periodic) return grid_of(c).geometry();
  return build_lattice(c.geometry.dim, c.geometry.n, c.geometry.spacing);
}

inline DriveField drive_of(const RunConfig& c) {
  DriveField d;
  d.rabi = c.drive.rabi;
  d.detuning = c.drive.detuning;
  d.polarization = tilted_pi_polarization(c.drive.theta);
  d.pulse = Pulse{c.drive.pulse, c.drive.t_off};
  return d;
}

inline Bipartition bipartition_of(const RunConfig& c) {
  return c.subsystem.empty() ? Bipartition::central(c.geometry.n_atoms()) : Bipartition{c.subsystem};
}

inline std::string mode_label(int nx, int nz) { return std::to_string(nx) + ":" + std::to_string(nz); }

/// (nx, nz) list: the configured modes or the whole reciprocal grid.
inline std::vector<std::array<int, 2>> modes_of(const RunConfig& c) {
  if (!c.dtwa.modes.empty()) return c.dtwa.modes;
  const PeriodicGrid g = grid_of(c);
  std::vector<std::array<int, 2>> m;
  for (int nz = 0; nz < g.lz; ++nz)
    for (int nx = 0; nx < g.lx; ++nx) m.push_back({nx, nz});
  return m;
}

inline OdeOptions ode_of(const RunConfig& c) {
  OdeOptions o;
  o.rtol = c.ed.rtol;
  o.atol = c.ed.atol;
  return o;
}

class RowSink {
 public:
  RowSink(std::vector<ResultRow>& rows, Real param) : rows_(rows), param_(param) {}
  void add(Real t, const std::string& obs, const std::string& label, Real v,
           Real err = std::numeric_limits<Real>::quiet_NaN()) {
    rows_.push_back({t, param_, obs, label, v, err});
  }

 private:
  std::vector<ResultRow>& rows_;
  Real param_;
};

/// Mode observables from spin moments (ED, GSM, XY, cumulant).
inline void emit_mode_rows(const RunConfig& c, const SpinMoments& m, const ArrayGeometry& geom, Real t, RowSink& out) {
  const bool nk = wants(c, "nk"), p2 = wants(c, "p2"), sq = wants(c, "squeezing");
  if (!nk && !p2 && !sq) return;
  const PeriodicGrid g = grid_of(c);
  const Real sx = collective_sx(m);
  for (const auto& md : modes_of(c)) {
    const ModeMoments mm = mode_moments(m, geom, g.wavevector(md[0], md[1]));
    const std::string lab = mode_label(md[0], md[1]);
    if (nk) out.add(t, "nk", lab, mm.occupation());
    if (p2) out.add(t, "p2", lab, mm.p2());
    if (sq) {
      Eigen::Matrix2d cov;
      cov << mm.sz2, -mm.szy, -mm.szy, mm.sy2;
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
      out.add(t, "wineland", lab, m.n * es.eigenvalues()(0) / (sx * sx));
      out.add(t, "wineland_orth", lab, m.n * es.eigenvalues()(1) / (sx * sx));
    }
  }
}

inline void emit_spin_rows(const RunConfig& c, const SpinMoments& m, const ArrayGeometry& geom, Real t, RowSink& out) {
  if (wants(c, "toth")) {
    const TothResult r = toth_squeezing(m);
    out.add(t, "toth", "", r.xi2);
  }
  if (wants(c, "sx")) out.add(t, "sx", "", collective_sx(m));
  emit_mode_rows(c, m, geom, t, out);
}

inline void run_ed(const RunConfig& c, RowSink& out, nlohmann::json& diag) {
  const AtomArray sys(level_scheme_by_name(c.levels), geometry_of(c), drive_of(c), PolarizationBasis(c.drive.theta));
  const int n = sys.n_atoms();
  const int cap = c.ed.max_excitations < 0 ? n : std::min(c.ed.max_excitations, n);
  const TruncatedModel tm = build_truncated_model(sys, cap);
  const ProductSpace space = sys.space();
  const CMatrix rho0 = tm.restrict(product_density(space, default_local_state(sys.scheme)));
  const Bipartition part = bipartition_of(c);
  PropagationOptions po;
  po.ode = ode_of(c);
  const PropagationReport rep = propagate(tm.model, rho0, c.time_grid(), [&](Real t, const CMatrix& r) {
    const CMatrix rho = tm.embed(r);
    if (wants(c, "excited")) out.add(t, "excited", "", excited_population(space, sys.scheme, rho));
    if (wants(c, "population")) {
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < sys.scheme.local_dim(); ++l)
          out.add(t, "population", std::to_string(i) + ":" + std::to_string(l), level_population(space, rho, i, l));
    }
    if (wants(c, "negativity")) out.add(t, "negativity", "", log_negativity(space, rho, part));
    if (wants(c, "renyi2")) out.add(t, "renyi2", "", renyi2(space, rho, part));
  }, po);
  diag["dimension"] = tm.model.dim();
  diag["max_excitations"] = cap;
  diag["ode_steps"] = rep.stats.accepted;
  diag["max_trace_error"] = rep.max_trace_error;
  diag["min_eigenvalue"] = rep.min_eigenvalue;
  diag["positivity_warning"] = rep.positivity_warning;
}

inline void run_gsm(const RunConfig& c, RowSink& out, nlohmann::json& diag) {
  const AtomArray sys(level_scheme_by_name(c.levels), geometry_of(c), drive_of(c), PolarizationBasis(c.drive.theta));
  const EffectiveModel em = effective_operators(sys);
  const LindbladModel lm = em.lindblad();
  const CMatrix rho0 = ground_product_density(em, default_ground_state(sys.scheme));
  const Bipartition part = bipartition_of(c);
  const ArrayGeometry geom = sys.geometry;
  const bool spin_half = sys.scheme.n_ground() == 2;
  for (const auto& o : {"toth", "sx", "nk", "p2", "squeezing"}) {
    if (wants(c, o) && !spin_half) throw ConfigError(std::string("observable '") + o + "' needs two ground sublevels");
  }
  PropagationOptions po;
  po.ode = ode_of(c);
  const PropagationReport rep = propagate(lm, rho0, c.time_grid(), [&](Real t, const CMatrix& rho) {
    if (wants(c, "population")) {
      for (int i = 0; i < sys.n_atoms(); ++i)
        for (int l = 0; l < sys.scheme.n_ground(); ++l)
          out.add(t, "population", std::to_string(i) + ":" + std::to_string(l), level_population(em.ground_space, rho, i, l));
    }
    if (wants(c, "negativity")) out.add(t, "negativity", "", log_negativity(em.ground_space, rho, part));
    if (wants(c, "renyi2")) out.add(t, "renyi2", "", renyi2(em.ground_space, rho, part));
    if (spin_half) emit_spin_rows(c, spin_moments(em.ground_space, rho), geom, t, out);
  }, po);
  diag["dimension"] = lm.dim();
  diag["reciprocal_condition"] = em.reciprocal_condition;
  diag["ode_steps"] = rep.stats.accepted;
  diag["max_trace_error"] = rep.max_trace_error;
  diag["min_eigenvalue"] = rep.min_eigenvalue;
  diag["positivity_warning"] = rep.positivity_warning;
}

inline XYModel xy_model_of(const RunConfig& c, const ArrayGeometry& geom) {
  const PolarizationBasis basis(c.drive.theta);
  if (c.geometry.periodic) return periodic_xy_model(grid_of(c), drive_of(c), basis);
  return xy_truncation(DipoleCouplings(geom, basis), geom, drive_of(c));
}

inline std::vector<Eigen::Vector3d> x_polarized(int n) { return std::vector<Eigen::Vector3d>(static_cast<std::size_t>(n), {1.0, 0.0, 0.0}); }

inline void run_xy(const RunConfig& c, RowSink& out, nlohmann::json& diag) {
  const ArrayGeometry geom = geometry_of(c);
  const XYModel m = xy_model_of(c, geom);
  const LindbladModel lm = xy_lindblad(m, c.dissipation);
  const ProductSpace space(m.n(), 2);
  CVector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const Bipartition part = bipartition_of(c);
  PropagationOptions po;
  po.ode = ode_of(c);
  const PropagationReport rep = propagate(lm, product_density(space, plus), c.time_grid(), [&](Real t, const CMatrix& rho) {
    if (wants(c, "negativity")) out.add(t, "negativity", "", log_negativity(space, rho, part));
    if (wants(c, "renyi2")) out.add(t, "renyi2", "", renyi2(space, rho, part));
    emit_spin_rows(c, spin_moments(space, rho), geom, t, out);
  }, po);
  diag["dimension"] = lm.dim();
  diag["ode_steps"] = rep.stats.accepted;
  diag["max_trace_error"] = rep.max_trace_error;
  if (!m.warning.empty()) diag["warning"] = m.warning;
}

inline void run_cumulant(const RunConfig& c, RowSink& out, nlohmann::json& diag) {
  const ArrayGeometry geom = geometry_of(c);
  const XYModel m = xy_model_of(c, geom);
  const PauliLindblad pl = pauli_form(m, c.dissipation);
  OdeOptions o = ode_of(c);
  const CumulantReport rep = propagate_cumulant(pl, CumulantState::product(x_polarized(m.n())), c.time_grid(),
                                                [&](Real t, const CumulantState& s) {
                                                  emit_spin_rows(c, s.moments(), geom, t, out);
                                                }, o);
  diag["ode_steps"] = rep.stats.accepted;
  diag["max_bloch_excess"] = rep.max_bloch_excess;
  if (!m.warning.empty()) diag["warning"] = m.warning;
}

inline void run_swa(const RunConfig& c, RowSink& out, nlohmann::json& diag) {
  const PeriodicGrid g = grid_of(c);
  const SpinWaveSpectrum spec(periodic_xy_model(g, drive_of(c), PolarizationBasis(c.drive.theta)), g);
  diag["max_imag_fourier"] = spec.max_imag();
  int unstable = 0;
  for (const auto& md : spec.modes()) unstable += md.unstable() ? 1 : 0;
  diag["unstable_modes"] = unstable;
  for (Real t : c.time_grid()) {
    for (const auto& md : modes_of(c)) {
      const SpinWaveMode& m = spec.mode(md[0], md[1]);
      const std::string lab = mode_label(md[0], md[1]);
      if (wants(c, "nk")) out.add(t, "nk", lab, mode_occupation(m, t));
      if (wants(c, "p2")) out.add(t, "p2", lab, variance_p(m, t));
      if (wants(c, "xi2")) out.add(t, "xi2", lab, m.xi2);
      if (wants(c, "squeezing") && m.squeezable) {
        const Real phi = t > 0.0 ? optimal_angle(m, t) : 0.0;
        out.add(t, "wineland", lab, 2.0 * quadrature_variance(m, t, phi));
        out.add(t, "wineland_orth", lab, 2.0 * quadrature_variance(m, t, phi + 0.5 * kPi));
        out.add(t, "phi_star", lab, phi);
      }
    }
  }
}

inline void run_dtwa_tier(const RunConfig& c, RowSink& out, nlohmann::json& diag) {
  const PeriodicGrid g = grid_of(c);
  const XYModel m = periodic_xy_model(g, drive_of(c), PolarizationBasis(c.drive.theta));
  const auto modes = modes_of(c);
  std::vector<Vec3> ks;
  for (const auto& md : modes) ks.push_back(g.wavevector(md[0], md[1]));
  DtwaOptions o;
  o.n_traj = c.dtwa.n_traj;
  o.seed = c.seed;
  o.threads = c.threads;
  const auto ts = c.time_grid();
  const DtwaResult r = run_dtwa(m, g.geometry(), ks, ts, o);
  diag["n_traj"] = r.n_traj;
  diag["max_norm_drift"] = r.max_norm_drift;
  diag["max_energy_drift"] = r.max_energy_drift;
  for (std::size_t ti = 0; ti < ts.size(); ++ti) {
    if (wants(c, "sx")) out.add(ts[ti], "sx", "", r.sx[ti], r.sx_se[ti]);
    for (std::size_t k = 0; k < modes.size(); ++k) {
      const ModeEstimate& e = r.estimates[ti][k];
      const std::string lab = mode_label(modes[k][0], modes[k][1]);
      if (wants(c, "nk")) out.add(ts[ti], "nk", lab, e.n_k, e.n_k_se);
      if (wants(c, "p2")) out.add(ts[ti], "p2", lab, e.p2, e.p2_se);
      if (wants(c, "squeezing")) {
        out.add(ts[ti], "wineland", lab, e.wineland, e.wineland_se);
        out.add(ts[ti], "wineland_orth", lab, e.wineland_orth, e.wineland_orth_se);
        out.add(ts[ti], "phi_star", lab, e.phi_star);
      }
    }
  }
}

inline void run_single(const RunConfig& c, RowSink& out, nlohmann::json& diag) {
  switch (c.solver) {
    case Solver::kEd: run_ed(c, out, diag); break;
    case Solver::kGsm: run_gsm(c, out, diag); break;
    case Solver::kXy: run_xy(c, out, diag); break;
    case Solver::kSwa: run_swa(c, out, diag); break;
    case Solver::kDtwa: run_dtwa_tier(c, out, diag); break;
    case Solver::kCumulant: run_cumulant(c, out, diag); break;
  }
}

}  // namespace run_detail

/// Runs one configuration. Scan points run on up to `threads` workers; rows
/// are concatenated in scan order so output does not depend on scheduling.
inline RunResult run(const RunConfig& cfg) {
  const auto errors = validate(cfg);
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  for (const auto& o : cfg.observables) {
    if (!supported_observables(cfg.solver).count(o)) {
      throw ConfigError("observable '" + o + "' is not available for solver '" + solver_name(cfg.solver) + "'");
    }
  }
  const auto start = std::chrono::steady_clock::now();
  RunResult res;
  res.config = cfg;
  const bool scan = !cfg.scan.parameter.empty();
  const std::size_t n_points = scan ? cfg.scan.values.size() : 1;
  std::vector<std::vector<ResultRow>> rows(n_points);
  std::vector<nlohmann::json> diags(n_points, nlohmann::json::object());
  std::vector<std::exception_ptr> failures(n_points);

  auto run_point = [&](std::size_t p) {
    try {
      RunConfig c = cfg;
      Real param = std::numeric_limits<Real>::quiet_NaN();
      if (scan) {
        param = cfg.scan.values[p];
        if (cfg.scan.parameter == "detuning") c.drive.detuning = param;
        if (cfg.scan.parameter == "rabi") c.drive.rabi = param;
        if (cfg.scan.parameter == "theta") c.drive.theta = param;
        c.threads = 1;
      }
      run_detail::RowSink sink(rows[p], param);
      run_detail::run_single(c, sink, diags[p]);
    } catch (...) {
      failures[p] = std::current_exception();
    }
  };
  const int workers = scan ? std::max(1, std::min<int>(cfg.threads, static_cast<int>(n_points))) : 1;
  if (workers == 1) {
    for (std::size_t p = 0; p < n_points; ++p) run_point(p);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t p = next++; p < n_points; p = next++) run_point(p);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  for (std::size_t p = 0; p < n_points; ++p) {
    res.rows.insert(res.rows.end(), rows[p].begin(), rows[p].end());
  }
  res.diagnostics = scan ? nlohmann::json(diags) : diags[0];
  res.wall_seconds = std::chrono::duration<Real>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace dipolar
