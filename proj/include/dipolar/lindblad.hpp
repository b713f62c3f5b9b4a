#pragma once

// Generic Markovian master equation
//
//   drho/dt = -i[H(t), rho] + g(t) sum_ab Gamma_ab (2 L_b rho L_a^+ - {L_a^+ L_b, rho})
//
// with H(t) = H_0 + f(t) H_1. The anticommutator is folded into the
// non-Hermitian H_nh = H - i g sum_ab Gamma_ab L_a^+ L_b, so with M = H_nh rho
//
//   drho/dt = -i M + i M^+ + 2 g sum_a A_a (L_a rho)^+,   A_a = sum_b Gamma_ab L_b,
//
// using rho = rho^+. L_a rho only has rows in the range of L_a, which keeps
// the jump term cheap for local jump operators.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dipolar/core.hpp"
#include "dipolar/ode.hpp"

namespace dipolar {

struct LindbladModel {
  SpMatrix h_static;                     ///< H_0
  SpMatrix h_drive;                      ///< H_1, scaled by drive_scale(t)
  std::vector<SpMatrix> jumps;           ///< L_b
  CMatrix rates;                         ///< Gamma_ab, Hermitian PSD
  std::function<Real(Real)> drive_scale = [](Real) { return 1.0; };
  std::function<Real(Real)> dissipator_scale = [](Real) { return 1.0; };
  std::vector<Real> breakpoints;         ///< times where the scales jump

  [[nodiscard]] Eigen::Index dim() const { return h_static.rows(); }
};

/// Precomputed form of a LindbladModel ready for repeated RHS evaluation on
/// row-major density matrices.
class LindbladRhs {
 public:
  explicit LindbladRhs(const LindbladModel& model) : model_(&model) {
    const Eigen::Index dim = model.dim();
    h_static_ = model.h_static;
    h_drive_ = model.h_drive.size() == 0 ? SpMatrix(dim, dim) : model.h_drive;
    decay_ = SpMatrix(dim, dim);
    if (model.jumps.empty()) return;

    const auto nj = static_cast<Eigen::Index>(model.jumps.size());
    if (model.rates.rows() != nj || model.rates.cols() != nj) {
      throw InvalidInput("rate matrix size does not match the number of jump operators");
    }
    if ((model.rates - model.rates.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + model.rates.cwiseAbs().maxCoeff())) {
      throw InvalidInput("rate matrix is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(model.rates, Eigen::EigenvaluesOnly);
    const Real scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-10 * scale) throw NumericalError("rate matrix is not positive semidefinite");

    SpMatrix sum_la_a(dim, dim);
    for (Eigen::Index a = 0; a < nj; ++a) {
      SpMatrix acc(dim, dim);
      for (Eigen::Index b = 0; b < nj; ++b) {
        const Complex g = model.rates(a, b);
        if (g != Complex(0.0)) acc += g * model.jumps[static_cast<std::size_t>(b)];
      }
      acc.prune(Complex(0.0));
      acc.makeCompressed();
      const SpMatrix& la = model.jumps[static_cast<std::size_t>(a)];
      const SpMatrix la_dag = la.adjoint();
      const SpMatrix term = la_dag * acc;
      sum_la_a += term;

      Channel ch;
      ch.a_op = std::move(acc);
      std::vector<Eigen::Triplet<Complex>> trips;
      for (Eigen::Index r = 0; r < la.outerSize(); ++r) {
        bool any = false;
        for (SpMatrix::InnerIterator it(la, r); it; ++it) {
          if (it.value() == Complex(0.0)) continue;
          trips.emplace_back(static_cast<int>(ch.rows.size()), static_cast<int>(it.col()), it.value());
          any = true;
        }
        if (any) ch.rows.push_back(static_cast<int>(r));
      }
      if (ch.rows.empty() || ch.a_op.nonZeros() == 0) continue;
      ch.compact = SpMatrix(static_cast<Eigen::Index>(ch.rows.size()), dim);
      ch.compact.setFromTriplets(trips.begin(), trips.end());
      ch.compact.makeCompressed();
      channels_.push_back(std::move(ch));
    }
    decay_ = Complex(0.0, -1.0) * sum_la_a;
    decay_.prune(Complex(0.0));
    decay_.makeCompressed();
  }

  /// dydt = L(t) rho for Hermitian rho.
  void operator()(Real t, const RowCMatrix& rho, RowCMatrix& dydt) {
    const Real f = model_->drive_scale(t);
    const Real g = model_->dissipator_scale(t);
    const SpMatrix& hnh = effective_hamiltonian(f, g);
    m_.noalias() = hnh * rho;
    dydt.noalias() = m_.adjoint();
    dydt -= m_;
    dydt *= Complex(0.0, 1.0);
    if (g == 0.0) return;
    const Complex w = 2.0 * g;
    for (const Channel& ch : channels_) {
      ct_.noalias() = ch.compact * rho;   // rows of L_a rho
      c_.noalias() = ct_.adjoint();       // columns of rho L_a^+
      z_.noalias() = ch.a_op * c_;
      const auto n = static_cast<Eigen::Index>(ch.rows.size());
      for (Eigen::Index p = 0; p < dydt.rows(); ++p) {
        Complex* out = &dydt(p, 0);
        const Complex* src = &z_(p, 0);
        for (Eigen::Index k = 0; k < n; ++k) out[ch.rows[static_cast<std::size_t>(k)]] += w * src[k];
      }
    }
    // The jump term used rho = rho^+. Round-off breaks that, and the
    // anti-Hermitian remainder would evolve with the jump sign flipped and
    // grow; keeping the derivative Hermitian freezes it instead.
    sym_.noalias() = dydt.adjoint();
    dydt += sym_;
    dydt *= 0.5;
  }

  /// H_0 + f H_1 - i g sum Gamma_ab L_a^+ L_b (cached per (f, g)).
  const SpMatrix& effective_hamiltonian(Real f, Real g) {
    if (!cache_valid_ || f != cached_f_ || g != cached_g_) {
      cached_ = h_static_;
      if (f != 0.0) cached_ += f * h_drive_;
      if (g != 0.0) cached_ += g * decay_;
      cached_.prune(Complex(0.0));
      cached_.makeCompressed();
      cached_f_ = f;
      cached_g_ = g;
      cache_valid_ = true;
    }
    return cached_;
  }

  [[nodiscard]] std::size_t n_channels() const { return channels_.size(); }

 private:
  struct Channel {
    std::vector<int> rows;  ///< nonzero rows of L_a
    SpMatrix compact;       ///< those rows of L_a
    SpMatrix a_op;          ///< A_a = sum_b Gamma_ab L_b
  };

  const LindbladModel* model_;
  SpMatrix h_static_;
  SpMatrix h_drive_;
  SpMatrix decay_;
  std::vector<Channel> channels_;
  SpMatrix cached_;
  Real cached_f_ = 0.0;
  Real cached_g_ = 0.0;
  bool cache_valid_ = false;
  RowCMatrix m_, ct_, c_, z_, sym_;
};

/// Validity diagnostics of a density matrix.
struct StateCheck {
  Real trace_error = 0.0;
  Real hermiticity_error = 0.0;
  Real min_eigenvalue = 0.0;
};

inline StateCheck check_state(const CMatrix& rho, bool with_eigenvalues) {
  StateCheck c;
  c.trace_error = std::abs(rho.trace() - Complex(1.0));
  c.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (with_eigenvalues) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    c.min_eigenvalue = es.eigenvalues().minCoeff();
  }
  return c;
}

struct PropagationOptions {
  OdeOptions ode{};
  int positivity_checkpoints = 20;   ///< eigenvalue checks spread over the grid
  Real positivity_tolerance = 1e-7;  ///< flag eigenvalues below -tolerance
};

struct PropagationReport {
  OdeStats stats;
  Real max_trace_error = 0.0;
  Real max_hermiticity_error = 0.0;
  Real min_eigenvalue = std::numeric_limits<Real>::infinity();
  bool positivity_warning = false;
  CMatrix final_state;
};

/// Propagates rho0 over t_grid, invoking observe(t, rho) at every grid time.
/// Positivity is monitored (eigenvalue checks at checkpoints), not enforced.
template <class Observer>
PropagationReport propagate(const LindbladModel& model, const CMatrix& rho0, const std::vector<Real>& t_grid,
                            Observer&& observe, const PropagationOptions& opt = {}) {
  if (rho0.rows() != model.dim() || rho0.cols() != model.dim()) {
    throw InvalidInput("initial state dimension does not match the model");
  }
  LindbladRhs rhs(model);
  PropagationReport rep;
  const std::size_t n_out = t_grid.size();
  const std::size_t every = opt.positivity_checkpoints > 0
                                ? std::max<std::size_t>(1, n_out / static_cast<std::size_t>(opt.positivity_checkpoints))
                                : 0;
  std::size_t idx = 0;
  CMatrix rho;
  auto obs = [&](Real t, const RowCMatrix& r) {
    rho = r;
    const bool eig = every > 0 && (idx % every == 0 || idx + 1 == n_out);
    const StateCheck c = check_state(rho, eig);
    rep.max_trace_error = std::max(rep.max_trace_error, c.trace_error);
    rep.max_hermiticity_error = std::max(rep.max_hermiticity_error, c.hermiticity_error);
    if (eig) {
      rep.min_eigenvalue = std::min(rep.min_eigenvalue, c.min_eigenvalue);
      if (c.min_eigenvalue < -opt.positivity_tolerance) rep.positivity_warning = true;
    }
    ++idx;
    observe(t, static_cast<const CMatrix&>(rho));
    if (idx == n_out) rep.final_state = rho;
  };
  auto f = [&rhs](Real t, const RowCMatrix& y, RowCMatrix& dy) { rhs(t, y, dy); };
  rep.stats = integrate_dopri5(f, RowCMatrix(rho0), t_grid, model.breakpoints, obs, opt.ode);
  return rep;
}

}  // namespace dipolar
