#pragma once

// Free-space dyadic Green's tensor and the elastic/inelastic coupling tables
// Delta^{ij}_{qq'} = e_q^* . Re G(r_ij) . e_q',  Gamma^{ij}_{qq'} = e_q^* . Im G(r_ij) . e_q'.

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dipolar/core.hpp"
#include "dipolar/lattice.hpp"

namespace dipolar {

/// G(r) in units of Gamma. With near_field_only, keeps only the -e^{ix}/x^3
/// part of the (1 - 3 rr) term, which is what the quasi-static 1/r^3 closed
/// forms describe.
inline CMat3 green_tensor(const Vec3& r, Real gamma = 1.0, bool near_field_only = false) {
  const Real dist = r.norm();
  if (!(dist > 0.0)) throw InvalidInput("green_tensor: |r| must be > 0");
  const Vec3 n = r / dist;
  const Mat3 rr = n * n.transpose();
  const Mat3 id = Mat3::Identity();
  const Real x = kK0 * dist;
  const Complex e = std::exp(kI * x);
  Complex transverse = e / x;
  Complex longitudinal = kI * e / (x * x) - e / (x * x * x);
  if (near_field_only) {
    transverse = 0.0;
    longitudinal = -e / (x * x * x);
  }
  return 0.75 * gamma * ((id - rr).cast<Complex>() * transverse + (id - 3.0 * rr).cast<Complex>() * longitudinal);
}

/// Pairwise couplings for an array. Entries are 3x3 blocks indexed by
/// (q + 1, q' + 1). Self terms follow the convention Delta^{ii} = 0 and
/// Gamma^{ii} = (Gamma/2) delta_{qq'}.
class DipoleCouplings {
 public:
  DipoleCouplings() = default;

  DipoleCouplings(const ArrayGeometry& geom, const PolarizationBasis& basis, Real gamma = 1.0,
                  bool near_field_only = false)
      : n_(geom.size()), gamma0_(gamma), delta_(n_ * n_, CMat3::Zero()), gamma_(n_ * n_, CMat3::Zero()) {
    validate_geometry(geom);
    CMat3 e;  // columns e_q
    for (int q = -1; q <= 1; ++q) e.col(q + 1) = basis[q];
    const CMat3 e_adj = e.adjoint();
    for (std::size_t i = 0; i < n_; ++i) {
      gamma_[i * n_ + i] = 0.5 * gamma * CMat3::Identity();
      for (std::size_t j = 0; j < n_; ++j) {
        if (i == j) continue;
        const CMat3 g = green_tensor(geom.displacement(i, j), gamma, near_field_only);
        delta_[i * n_ + j] = clean(e_adj * g.real().cast<Complex>() * e);
        gamma_[i * n_ + j] = clean(e_adj * g.imag().cast<Complex>() * e);
      }
    }
  }

  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] Real gamma0() const { return gamma0_; }

  [[nodiscard]] Complex delta(std::size_t i, std::size_t j, int q, int qp) const {
    return delta_[i * n_ + j](q + 1, qp + 1);
  }
  [[nodiscard]] Complex gamma(std::size_t i, std::size_t j, int q, int qp) const {
    return gamma_[i * n_ + j](q + 1, qp + 1);
  }
  [[nodiscard]] const CMat3& delta_block(std::size_t i, std::size_t j) const { return delta_[i * n_ + j]; }
  [[nodiscard]] const CMat3& gamma_block(std::size_t i, std::size_t j) const { return gamma_[i * n_ + j]; }

  /// Collective rate matrix over (atom, q) pairs, index a = i * nq + k for
  /// q = qs[k]. Hermitian PSD for physical geometries.
  [[nodiscard]] CMatrix gamma_matrix(const std::vector<int>& qs = {-1, 0, 1}) const {
    const auto nq = static_cast<Eigen::Index>(qs.size());
    CMatrix m(static_cast<Eigen::Index>(n_) * nq, static_cast<Eigen::Index>(n_) * nq);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        for (Eigen::Index a = 0; a < nq; ++a) {
          for (Eigen::Index b = 0; b < nq; ++b) {
            m(static_cast<Eigen::Index>(i) * nq + a, static_cast<Eigen::Index>(j) * nq + b) =
                gamma(i, j, qs[static_cast<std::size_t>(a)], qs[static_cast<std::size_t>(b)]);
          }
        }
      }
    }
    return m;
  }

  /// Smallest eigenvalue of the collective rate matrix.
  [[nodiscard]] Real min_rate_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(gamma_matrix());
    return es.eigenvalues().minCoeff();
  }

 private:
  // Zero round-off residue (entries that vanish by symmetry come out ~1e-17).
  static CMat3 clean(CMat3 m) {
    const Real tol = 1e-14 * m.cwiseAbs().maxCoeff();
    for (Eigen::Index r = 0; r < 3; ++r) {
      for (Eigen::Index c = 0; c < 3; ++c) {
        Complex& v = m(r, c);
        v = Complex(std::abs(v.real()) <= tol ? 0.0 : v.real(), std::abs(v.imag()) <= tol ? 0.0 : v.imag());
      }
    }
    return m;
  }

  std::size_t n_ = 0;
  Real gamma0_ = 1.0;
  std::vector<CMat3> delta_;
  std::vector<CMat3> gamma_;
};

inline DipoleCouplings couplings(const ArrayGeometry& geom, const PolarizationBasis& basis, Real gamma = 1.0,
                                 bool near_field_only = false) {
  return DipoleCouplings(geom, basis, gamma, near_field_only);
}

}  // namespace dipolar
