#pragma once

// Entanglement and collective-spin observables on density matrices.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "dipolar/core.hpp"
#include "dipolar/hilbert.hpp"
#include "dipolar/lattice.hpp"

namespace dipolar {

/// Sites in subsystem A; B is the complement.
struct Bipartition {
  std::vector<int> a_sites;

  /// Middle atom of a chain of n sites (site n/2).
  static Bipartition central(int n_sites) { return {{n_sites / 2}}; }

  void validate(int n_sites) const {
    if (a_sites.empty()) throw InvalidInput("bipartition: subsystem A is empty");
    std::vector<int> s = a_sites;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw InvalidInput("bipartition: repeated site");
    if (s.front() < 0 || s.back() >= n_sites) throw InvalidInput("bipartition: site out of range");
  }
};

/// rho^{T_A}: transpose of the A-factor indices.
inline CMatrix partial_transpose(const ProductSpace& space, const CMatrix& rho, const Bipartition& part) {
  if (rho.rows() != space.dim() || rho.cols() != space.dim()) {
    throw InvalidInput("partial_transpose: density matrix does not match the product space");
  }
  part.validate(space.n_sites());
  const auto dim = static_cast<Eigen::Index>(space.dim());
  // a_part(s): the A-digits of s placed at their positions; s - a_part(s) is the B part.
  std::vector<std::int64_t> a_part(static_cast<std::size_t>(dim));
  for (Eigen::Index s = 0; s < dim; ++s) {
    std::int64_t v = 0;
    for (int site : part.a_sites) v += space.digit(s, site) * space.stride(site);
    a_part[static_cast<std::size_t>(s)] = v;
  }
  CMatrix out(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    const std::int64_t ac = a_part[static_cast<std::size_t>(c)];
    for (Eigen::Index r = 0; r < dim; ++r) {
      const std::int64_t ar = a_part[static_cast<std::size_t>(r)];
      // swap A digits between row and column
      out(r, c) = rho(static_cast<Eigen::Index>(r - ar + ac), static_cast<Eigen::Index>(c - ac + ar));
    }
  }
  return out;
}

/// Eigenvalues below -cutoff count as negative.
inline constexpr Real kNegativityCutoff = 1e-12;

/// log2(2 N + 1) with N the magnitude of the negative partial-transpose spectrum.
inline Real log_negativity(const ProductSpace& space, const CMatrix& rho, const Bipartition& part) {
  const CMatrix pt = partial_transpose(space, rho, part);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (pt + pt.adjoint()), Eigen::EigenvaluesOnly);
  Real neg = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const Real l = es.eigenvalues()(k);
    if (l < -kNegativityCutoff) neg += -l;
  }
  return std::log2(2.0 * neg + 1.0);
}

/// Same quantity through the trace norm ||rho^{T_A}||_1 = sum of singular values.
inline Real log_negativity_trace_norm(const ProductSpace& space, const CMatrix& rho, const Bipartition& part) {
  const CMatrix pt = partial_transpose(space, rho, part);
  Eigen::BDCSVD<CMatrix> svd(pt);
  const Real trace_norm = svd.singularValues().sum();
  return std::log2(trace_norm / std::abs(rho.trace()));
}

/// Reduced density matrix on the sites of A (in increasing site order).
inline CMatrix reduced_density(const ProductSpace& space, const CMatrix& rho, const Bipartition& part) {
  part.validate(space.n_sites());
  std::vector<int> a = part.a_sites;
  std::sort(a.begin(), a.end());
  const ProductSpace sub(static_cast<int>(a.size()), space.local_dim());
  const auto dim = static_cast<Eigen::Index>(space.dim());
  std::vector<std::int64_t> a_index(static_cast<std::size_t>(dim));
  std::vector<std::int64_t> b_part(static_cast<std::size_t>(dim));
  for (Eigen::Index s = 0; s < dim; ++s) {
    std::int64_t idx = 0;
    std::int64_t apart = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const int dgt = space.digit(s, a[k]);
      idx += dgt * sub.stride(static_cast<int>(k));
      apart += dgt * space.stride(a[k]);
    }
    a_index[static_cast<std::size_t>(s)] = idx;
    b_part[static_cast<std::size_t>(s)] = s - apart;
  }
  CMatrix red = CMatrix::Zero(sub.dim(), sub.dim());
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      if (b_part[static_cast<std::size_t>(r)] == b_part[static_cast<std::size_t>(c)]) {
        red(a_index[static_cast<std::size_t>(r)], a_index[static_cast<std::size_t>(c)]) += rho(r, c);
      }
    }
  }
  return red;
}

/// Second-order Renyi entropy -log2 tr(rho_A^2).
inline Real renyi2(const ProductSpace& space, const CMatrix& rho, const Bipartition& part) {
  const CMatrix ra = reduced_density(space, rho, part);
  return -std::log2((ra * ra).trace().real());
}

// ---------------------------------------------------------------------------
// Spin-1/2 conventions: local basis {0: down, 1: up}, sigma^+ = |1><0|.

inline CMatrix pauli(int alpha) {
  CMatrix m = CMatrix::Zero(2, 2);
  switch (alpha) {
    case 0:  // x
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case 1:  // y: <1|sigma^y|0> = -i
      m(0, 1) = Complex(0.0, 1.0);
      m(1, 0) = Complex(0.0, -1.0);
      break;
    case 2:  // z = |1><1| - |0><0|
      m(0, 0) = -1.0;
      m(1, 1) = 1.0;
      break;
    default:
      throw InvalidInput("pauli: index must be 0, 1 or 2");
  }
  return m;
}

inline CMatrix sigma_plus() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(1, 0) = 1.0;
  return m;
}

/// First and second moments of N spin-1/2 sites.
struct SpinMoments {
  int n = 0;
  std::vector<Eigen::Vector3d> mean;               ///< <sigma^alpha_i>
  std::vector<Eigen::Matrix3d> pair;               ///< <sigma^alpha_i sigma^beta_j>, index i*n+j (i != j)

  [[nodiscard]] const Eigen::Matrix3d& corr(int i, int j) const {
    return pair[static_cast<std::size_t>(i * n + j)];
  }
};

/// Expectation values from a density matrix on the 2^N space.
inline SpinMoments spin_moments(const ProductSpace& space, const CMatrix& rho) {
  if (space.local_dim() != 2) throw InvalidInput("spin_moments: needs spin-1/2 sites");
  const int n = space.n_sites();
  SpinMoments m;
  m.n = n;
  m.mean.assign(static_cast<std::size_t>(n), Eigen::Vector3d::Zero());
  m.pair.assign(static_cast<std::size_t>(n * n), Eigen::Matrix3d::Zero());
  const auto dim = static_cast<Eigen::Index>(space.dim());
  // <O> = sum_{s,t} rho(t,s) O(s,t); Pauli strings map each s to one t.
  for (Eigen::Index s = 0; s < dim; ++s) {
    for (int i = 0; i < n; ++i) {
      const int di = space.digit(s, i);
      const Eigen::Index t = static_cast<Eigen::Index>(space.with_digit(s, i, 1 - di));
      // <sigma> = sum_s rho(s, t) sigma(t, s) with t the flipped state
      const Complex rx = rho(s, t);
      const Complex sy = pauli(1)(1 - di, di);
      m.mean[static_cast<std::size_t>(i)](0) += rx.real();
      m.mean[static_cast<std::size_t>(i)](1) += (rho(s, t) * sy).real();
      m.mean[static_cast<std::size_t>(i)](2) += (di == 1 ? 1.0 : -1.0) * rho(s, s).real();
    }
  }
  const std::array<CMatrix, 3> p{pauli(0), pauli(1), pauli(2)};
  for (Eigen::Index s = 0; s < dim; ++s) {
    for (int i = 0; i < n; ++i) {
      const int di = space.digit(s, i);
      for (int j = i + 1; j < n; ++j) {
        const int dj = space.digit(s, j);
        for (int a = 0; a < 3; ++a) {
          const int ti = a == 2 ? di : 1 - di;
          const Complex ei = p[static_cast<std::size_t>(a)](ti, di);
          for (int b = 0; b < 3; ++b) {
            const int tj = b == 2 ? dj : 1 - dj;
            const Complex ej = p[static_cast<std::size_t>(b)](tj, dj);
            const Eigen::Index t =
                static_cast<Eigen::Index>(space.with_digit(space.with_digit(s, i, ti), j, tj));
            const Real v = (rho(s, t) * ei * ej).real();
            m.pair[static_cast<std::size_t>(i * n + j)](a, b) += v;
          }
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      m.pair[static_cast<std::size_t>(j * n + i)] = m.pair[static_cast<std::size_t>(i * n + j)].transpose();
    }
  }
  return m;
}

struct TothResult {
  Real xi2 = 0.0;
  bool defined = true;
  Eigen::Matrix3d chi = Eigen::Matrix3d::Zero();
};

/// Generalized spin-squeezing parameter lambda_min(chi) / (<S^2> - N/2).
inline TothResult toth_squeezing(const SpinMoments& m) {
  const Real n = m.n;
  Eigen::Vector3d s = Eigen::Vector3d::Zero();
  for (const auto& v : m.mean) s += 0.5 * v;
  Eigen::Matrix3d j = (n / 4.0) * Eigen::Matrix3d::Identity();
  for (int a = 0; a < m.n; ++a) {
    for (int b = 0; b < m.n; ++b) {
      if (a != b) j += 0.25 * m.corr(a, b);
    }
  }
  j = 0.5 * (j + j.transpose()).eval();
  const Eigen::Matrix3d cov = j - s * s.transpose();
  TothResult r;
  r.chi = (n - 1.0) * cov + j;
  const Real denom = j.trace() - n / 2.0;
  if (!(denom > 0.0)) {
    r.defined = false;
    r.xi2 = std::numeric_limits<Real>::quiet_NaN();
    return r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(r.chi);
  r.xi2 = es.eigenvalues().minCoeff() / denom;
  return r;
}

/// Second moments of the spin-wave quadratures of mode k,
/// S~_z(k) = sum_i (cos_i sigma^z_i + sin_i sigma^y_i)/2 and
/// S~_y(k) = sum_i (cos_i sigma^y_i - sin_i sigma^z_i)/2 with phase k.r_i
/// (the Fourier components of Sigma^+_i = (-sigma^z_i + i sigma^y_i)/2).
struct ModeMoments {
  Real sz2 = 0.0;
  Real sy2 = 0.0;
  Real szy = 0.0;  ///< symmetrized <S~_z S~_y + S~_y S~_z>/2
  int n = 0;

  [[nodiscard]] Real occupation() const { return (sz2 + sy2) / n - 0.5; }
  [[nodiscard]] Real p2() const { return 2.0 * sy2 / n; }
  /// <S~_phi^2> with S~_phi = -S~_z cos(phi) + S~_y sin(phi).
  [[nodiscard]] Real quadrature(Real phi) const {
    const Real c = std::cos(phi), s = std::sin(phi);
    return c * c * sz2 - 2.0 * c * s * szy + s * s * sy2;
  }
};

inline ModeMoments mode_moments(const SpinMoments& m, const ArrayGeometry& geom, const Vec3& k) {
  if (static_cast<int>(geom.size()) != m.n) throw InvalidInput("mode_moments: geometry does not match moments");
  std::vector<Eigen::Vector3d> wz(static_cast<std::size_t>(m.n)), wy(static_cast<std::size_t>(m.n));
  for (int i = 0; i < m.n; ++i) {
    const Real ph = k.dot(geom.positions[static_cast<std::size_t>(i)]);
    wz[static_cast<std::size_t>(i)] = 0.5 * Eigen::Vector3d(0.0, std::sin(ph), std::cos(ph));
    wy[static_cast<std::size_t>(i)] = 0.5 * Eigen::Vector3d(0.0, std::cos(ph), -std::sin(ph));
  }
  ModeMoments r;
  r.n = m.n;
  for (int i = 0; i < m.n; ++i) {
    const auto& zi = wz[static_cast<std::size_t>(i)];
    const auto& yi = wy[static_cast<std::size_t>(i)];
    // same site: (a.sigma)(b.sigma) = a.b + i (a x b).sigma
    r.sz2 += zi.squaredNorm();
    r.sy2 += yi.squaredNorm();
    r.szy += zi.dot(yi);
    for (int j = 0; j < m.n; ++j) {
      if (i == j) continue;
      const Eigen::Matrix3d& c = m.corr(i, j);
      r.sz2 += zi.dot(c * wz[static_cast<std::size_t>(j)]);
      r.sy2 += yi.dot(c * wy[static_cast<std::size_t>(j)]);
      r.szy += zi.dot(c * wy[static_cast<std::size_t>(j)]);
    }
  }
  return r;
}

/// Mode occupation n_k = (<S~_z^2> + <S~_y^2>)/N - 1/2.
inline Real structure_factor(const SpinMoments& m, const ArrayGeometry& geom, const Vec3& k) {
  return mode_moments(m, geom, k).occupation();
}

/// Collective <S_x> = sum_i <sigma^x_i>/2.
inline Real collective_sx(const SpinMoments& m) {
  Real s = 0.0;
  for (const auto& v : m.mean) s += 0.5 * v(0);
  return s;
}

}  // namespace dipolar
