#pragma once

// Large-detuning truncation of the ground-manifold model for F = 1/2 -> 1/2
// atoms: anisotropic XY couplings plus single-body jump operators, and the
// N = 2 Pauli-basis analysis of H_eff.
//
// Spin-1/2 convention: local index 0 = g_-, 1 = g_+, sigma^+ = |g_+><g_-|.

#include <cmath>
#include <string>
#include <vector>

#include "dipolar/core.hpp"
#include "dipolar/full_model.hpp"
#include "dipolar/green.hpp"
#include "dipolar/hilbert.hpp"
#include "dipolar/lindblad.hpp"
#include "dipolar/observables.hpp"

namespace dipolar {

/// Anisotropic XY model H = sum_{i != j} (C^x_ij s^x_i s^x_j + C^y_ij s^y_i s^y_j)
/// with jumps L_0 = (Omega/3Delta) 1 and L_{+-1} = -(sqrt2 Omega/3Delta) sigma_-+.
struct XYModel {
  RMatrix cx;            ///< symmetric, zero diagonal
  RMatrix cy;
  Real rabi = 0.0;
  Real detuning = 0.0;
  CMatrix rates;         ///< Gamma^{ij}_{qq'} over (atom, q in {-1,0,1}), index 3*i + q + 1
  Real max_imag_coupling = 0.0;  ///< largest |Im Delta^{ij}| discarded (0 for the usual geometries)
  std::string warning;           ///< set when the large-detuning condition is not met

  [[nodiscard]] int n() const { return static_cast<int>(cx.rows()); }

  /// Amplitude of L_q: L_0 = a_0 * 1, L_{+-1} = a_{+-1} * sigma_-+.
  [[nodiscard]] Real jump_amplitude(int q) const {
    if (q == 0) return rabi / (3.0 * detuning);
    return -std::sqrt(2.0) * rabi / (3.0 * detuning);
  }

  /// Prefactor Omega^2 / (12 Delta^2) used to quote coefficients.
  [[nodiscard]] Real unit() const { return rabi * rabi / (12.0 * detuning * detuning); }
};

/// (C^x, C^y) for one pair from the coupling blocks Delta^{ij}_{1,1}, Delta^{ij}_{1,-1}.
inline std::pair<Real, Real> xy_coefficients(Complex d11, Complex d1m1, Real rabi, Real detuning) {
  const Real pref = -rabi * rabi / (9.0 * detuning * detuning);
  return {pref * (d11 + d1m1).real(), pref * (d11 - d1m1).real()};
}

/// Pair coefficients for a single displacement, straight from the Green's tensor.
inline std::pair<Real, Real> xy_pair(const Vec3& r, const PolarizationBasis& basis, Real rabi, Real detuning,
                                     bool near_field_only = false) {
  const CMat3 g = green_tensor(r, 1.0, near_field_only);
  const CMat3 re = g.real().cast<Complex>();
  const Complex d11 = basis[1].dot(re * basis[1]);     // dot() conjugates the first argument
  const Complex d1m1 = basis[1].dot(re * basis[-1]);
  return xy_coefficients(d11, d1m1, rabi, detuning);
}

/// Closed-form near-field C^x = (Omega^2/12Delta^2) cos(k0 r)/(k0 r)^3.
inline Real cx_closed_form(Real distance, Real rabi, Real detuning) {
  const Real x = kK0 * distance;
  return rabi * rabi / (12.0 * detuning * detuning) * std::cos(x) / (x * x * x);
}

inline XYModel xy_truncation(const DipoleCouplings& c, const ArrayGeometry& geom, const DriveField& drive) {
  const auto n = static_cast<Eigen::Index>(c.size());
  if (drive.detuning == 0.0) throw InvalidInput("xy_truncation: detuning must be nonzero");
  XYModel m;
  m.rabi = drive.rabi;
  m.detuning = drive.detuning;
  m.cx = RMatrix::Zero(n, n);
  m.cy = RMatrix::Zero(n, n);
  Real dmin = std::numeric_limits<Real>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      const Complex d11 = c.delta(ui, uj, 1, 1);
      const Complex d1m1 = c.delta(ui, uj, 1, -1);
      m.max_imag_coupling = std::max({m.max_imag_coupling, std::abs(d11.imag()), std::abs(d1m1.imag())});
      const auto [x, y] = xy_coefficients(d11, d1m1, drive.rabi, drive.detuning);
      m.cx(i, j) = x;
      m.cy(i, j) = y;
      dmin = std::min(dmin, geom.displacement(ui, uj).norm());
    }
  }
  m.cx = 0.5 * (m.cx + m.cx.transpose()).eval();
  m.cy = 0.5 * (m.cy + m.cy.transpose()).eval();
  m.rates = c.gamma_matrix({-1, 0, 1});
  if (n > 1) {
    const Real x = kK0 * dmin;
    const Real scale = c.gamma0() / (x * x * x);
    if (std::abs(drive.detuning) < 10.0 * scale) {
      m.warning = "detuning is not large compared with Gamma/(k0 r)^3; the XY truncation is unreliable";
    }
  }
  return m;
}

inline XYModel xy_truncation(const AtomArray& sys) { return xy_truncation(sys.couplings, sys.geometry, sys.drive); }

// ---------------------------------------------------------------------------
// Spin-1/2 operators on 2^N.

inline SpMatrix xy_hamiltonian(const XYModel& m) {
  const ProductSpace space(m.n(), 2);
  const CMatrix sx = pauli(0);
  const CMatrix sy = pauli(1);
  std::vector<Eigen::Triplet<Complex>> trips;
  for (int i = 0; i < m.n(); ++i) {
    for (int j = 0; j < m.n(); ++j) {
      if (i == j) continue;
      if (m.cx(i, j) != 0.0) add_product(space, {{i, &sx}, {j, &sx}}, m.cx(i, j), trips);
      if (m.cy(i, j) != 0.0) add_product(space, {{i, &sy}, {j, &sy}}, m.cy(i, j), trips);
    }
  }
  return from_triplets(space.dim(), space.dim(), trips);
}

/// Hermitian single-body term produced by the identity-proportional q = 0
/// jump: its cross terms with q = +-1 channels reduce to -i[H', rho] with
/// H' = i a_0 sum_{ij,q'} (Gamma^{ij}_{0q'} L^j_{q'} - h.c.). The (0,0) pairs cancel exactly.
inline SpMatrix xy_identity_jump_hamiltonian(const XYModel& m) {
  const ProductSpace space(m.n(), 2);
  const CMatrix sp = sigma_plus();
  const CMatrix sm = sp.adjoint();
  std::vector<Eigen::Triplet<Complex>> trips;
  const Real a0 = m.jump_amplitude(0);
  for (int i = 0; i < m.n(); ++i) {
    for (int j = 0; j < m.n(); ++j) {
      for (int qp : {-1, 1}) {
        const Complex g = m.rates(3 * i + 1, 3 * j + qp + 1);
        if (g == Complex(0.0)) continue;
        const CMatrix& s = qp == 1 ? sm : sp;  // L_{+1} ~ sigma_-, L_{-1} ~ sigma_+
        const Complex c = kI * a0 * g * m.jump_amplitude(qp);
        add_product(space, {{j, &s}}, c, trips);
        const CMatrix sd = s.adjoint();
        add_product(space, {{j, &sd}}, std::conj(c), trips);
      }
    }
  }
  return from_triplets(space.dim(), space.dim(), trips);
}

/// Master equation of the truncated model. The q = 0 jump is replaced by
/// its equivalent Hamiltonian term; q = +-1 jumps keep the full rate matrix.
inline LindbladModel xy_lindblad(const XYModel& m, bool with_dissipation = true) {
  LindbladModel lm;
  lm.h_static = xy_hamiltonian(m);
  const auto dim = lm.h_static.rows();
  lm.h_drive = SpMatrix(dim, dim);
  if (!with_dissipation) return lm;
  lm.h_static += xy_identity_jump_hamiltonian(m);
  const ProductSpace space(m.n(), 2);
  const CMatrix sp = sigma_plus();
  const CMatrix sm = sp.adjoint();
  std::vector<int> idx;
  for (int i = 0; i < m.n(); ++i) {
    for (int q : {-1, 1}) {
      lm.jumps.push_back(m.jump_amplitude(q) * site_operator(space, i, q == 1 ? sm : sp));
      idx.push_back(3 * i + q + 1);
    }
  }
  const auto nj = static_cast<Eigen::Index>(idx.size());
  lm.rates = CMatrix(nj, nj);
  for (Eigen::Index a = 0; a < nj; ++a) {
    for (Eigen::Index b = 0; b < nj; ++b) lm.rates(a, b) = m.rates(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  }
  return lm;
}

/// Relative distance ||H_eff - E0 1 - H_XY||_F / ||H_XY||_F with E0 the
/// trace part of H_eff - H_XY. Returns {ratio, E0}.
inline std::pair<Real, Real> xy_residual(const CMatrix& h_eff, const XYModel& m) {
  const CMatrix hxy = CMatrix(xy_hamiltonian(m));
  if (hxy.rows() != h_eff.rows()) throw InvalidInput("xy_residual: H_eff is not on the spin-1/2 ground space");
  CMatrix diff = h_eff - hxy;
  const Real e0 = diff.trace().real() / static_cast<Real>(diff.rows());
  diff.diagonal().array() -= e0;
  return {diff.norm() / hxy.norm(), e0};
}

// ---------------------------------------------------------------------------
// N = 2 Pauli decomposition.

struct PauliDecomposition {
  Real c_ii = 0.0;
  Eigen::Matrix<Real, 2, 3> c_single = Eigen::Matrix<Real, 2, 3>::Zero();  ///< C_alpha^i
  Real c_pp = 0.0;   ///< sigma+ sigma+ + h.c.
  Real c_pm = 0.0;   ///< sigma+ sigma- + h.c.
  Real c_zz = 0.0;
  Real residual = 0.0;

  [[nodiscard]] Real lambda1() const { return c_zz + c_pp + c_ii; }   ///< (|--> + |++>)/sqrt2
  [[nodiscard]] Real lambda2() const { return -c_zz + c_pm + c_ii; }  ///< (|-+> + |+->)/sqrt2
};

inline constexpr Real kPauliResidualTolerance = 1e-8;

namespace detail {
inline CMatrix kron2(const CMatrix& a, const CMatrix& b) {
  CMatrix out(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
  return out;
}
}  // namespace detail

/// Site 0 is the most significant factor (ProductSpace convention).
inline PauliDecomposition pauli_decompose_n2(const CMatrix& h) {
  if (h.rows() != 4 || h.cols() != 4) throw InvalidInput("pauli_decompose_n2: expects a 4x4 matrix");
  const CMatrix id = CMatrix::Identity(2, 2);
  const CMatrix sp = sigma_plus();
  const CMatrix sm = sp.adjoint();
  const CMatrix pp = detail::kron2(sp, sp) + detail::kron2(sm, sm);
  const CMatrix pm = detail::kron2(sp, sm) + detail::kron2(sm, sp);
  const CMatrix zz = detail::kron2(pauli(2), pauli(2));
  auto coef = [&h](const CMatrix& b) { return ((b.adjoint() * h).trace() / (b.adjoint() * b).trace()).real(); };

  PauliDecomposition d;
  CMatrix rec = CMatrix::Zero(4, 4);
  d.c_ii = coef(CMatrix::Identity(4, 4));
  rec += d.c_ii * CMatrix::Identity(4, 4);
  for (int a = 0; a < 3; ++a) {
    const CMatrix s0 = detail::kron2(pauli(a), id);
    const CMatrix s1 = detail::kron2(id, pauli(a));
    d.c_single(0, a) = coef(s0);
    d.c_single(1, a) = coef(s1);
    rec += d.c_single(0, a) * s0 + d.c_single(1, a) * s1;
  }
  d.c_pp = coef(pp);
  d.c_pm = coef(pm);
  d.c_zz = coef(zz);
  rec += d.c_pp * pp + d.c_pm * pm + d.c_zz * zz;
  d.residual = (h - rec).cwiseAbs().maxCoeff();
  if (d.residual > kPauliResidualTolerance) {
    throw NumericalError("pauli_decompose_n2: H_eff has components outside the decomposition basis (residual " +
                         std::to_string(d.residual) + ")");
  }
  return d;
}

/// Renyi-2 entropy of one atom for the unitary N = 2 evolution from |+>|+>.
inline Real renyi_closed_form(Real lambda1, Real lambda2, Real t) {
  return -std::log2(0.75 + 0.25 * std::cos(2.0 * (lambda1 - lambda2) * t));
}

}  // namespace dipolar
