#pragma once

// Linear spin-wave (Holstein-Primakoff + Bogoliubov) theory of the XY model
// on periodic chains and square lattices in the X-Z plane.
//
// Pauli frame rotated so that the initial |+x> state is the boson vacuum:
// Sigma^z = sigma^x, Sigma^y = sigma^y, Sigma^x = -sigma^z.

#include <cmath>
#include <complex>
#include <vector>

#include "dipolar/core.hpp"
#include "dipolar/green.hpp"
#include "dipolar/lattice.hpp"
#include "dipolar/xy_model.hpp"

namespace dipolar {

/// Periodic grid of lx * lz sites with spacing a. Site i sits at
/// ((i % lx) a, 0, (i / lx) a); lz = 1 is a chain along X.
struct PeriodicGrid {
  int lx = 1;
  int lz = 1;
  Real spacing = 0.1;

  static PeriodicGrid chain(int n, Real a) { return {n, 1, a}; }
  static PeriodicGrid square(int n_sites, Real a) {
    const int l = static_cast<int>(std::lround(std::sqrt(static_cast<Real>(n_sites))));
    if (l * l != n_sites) throw InvalidInput("square grid needs a perfect-square number of sites");
    return {l, l, a};
  }

  [[nodiscard]] int size() const { return lx * lz; }
  void validate() const {
    if (lx < 1 || lz < 1) throw InvalidInput("grid extents must be >= 1");
    if (!(spacing > 0.0)) throw InvalidInput("grid spacing must be > 0");
  }
  [[nodiscard]] ArrayGeometry geometry() const {
    ArrayGeometry g;
    for (int i = 0; i < size(); ++i) g.positions.emplace_back((i % lx) * spacing, 0.0, (i / lx) * spacing);
    return g;
  }
  /// Index of the wrapped displacement r_j - r_i.
  [[nodiscard]] int displacement_index(int i, int j) const {
    const int dx = ((j % lx) - (i % lx) + lx) % lx;
    const int dz = ((j / lx) - (i / lx) + lz) % lz;
    return dx + lx * dz;
  }
  /// Wavevector of mode (nx, nz): k = 2 pi (nx / (lx a), nz / (lz a)).
  [[nodiscard]] Vec3 wavevector(int nx, int nz) const {
    return {kTwoPi * nx / (lx * spacing), 0.0, kTwoPi * nz / (lz * spacing)};
  }
  /// Displacement vector for index d (components in [0, L)).
  [[nodiscard]] Vec3 displacement(int d) const { return {(d % lx) * spacing, 0.0, (d / lx) * spacing}; }
};

/// XY couplings on the periodic grid: C_ij depends only on the wrapped
/// displacement and is taken at the minimum image (ties averaged).
inline XYModel periodic_xy_model(const PeriodicGrid& grid, const DriveField& drive,
                                 const PolarizationBasis& basis = PolarizationBasis{}) {
  grid.validate();
  const int n = grid.size();
  std::vector<Real> kx(static_cast<std::size_t>(n), 0.0);
  std::vector<Real> ky(static_cast<std::size_t>(n), 0.0);
  for (int d = 1; d < n; ++d) {
    const int dx = d % grid.lx;
    const int dz = d / grid.lx;
    Real best = std::numeric_limits<Real>::infinity();
    std::vector<Vec3> images;
    for (int sx : {-1, 0}) {
      for (int sz : {-1, 0}) {
        const Vec3 r((dx + sx * grid.lx) * grid.spacing, 0.0, (dz + sz * grid.lz) * grid.spacing);
        const Real len = r.norm();
        if (len < best - 1e-12) {
          best = len;
          images.assign(1, r);
        } else if (std::abs(len - best) <= 1e-12) {
          images.push_back(r);
        }
      }
    }
    for (const Vec3& r : images) {
      const auto [cx, cy] = xy_pair(r, basis, drive.rabi, drive.detuning);
      kx[static_cast<std::size_t>(d)] += cx / static_cast<Real>(images.size());
      ky[static_cast<std::size_t>(d)] += cy / static_cast<Real>(images.size());
    }
  }
  XYModel m;
  m.rabi = drive.rabi;
  m.detuning = drive.detuning;
  m.cx = RMatrix::Zero(n, n);
  m.cy = RMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto d = static_cast<std::size_t>(grid.displacement_index(i, j));
      m.cx(i, j) = kx[d];
      m.cy(i, j) = ky[d];
    }
  }
  const DipoleCouplings c(grid.geometry(), basis);
  m.rates = c.gamma_matrix({-1, 0, 1});
  return m;
}

/// Kernel C(d) on wrapped displacements, averaged over all pairs sharing d.
inline std::vector<Real> coupling_kernel(const RMatrix& c, const PeriodicGrid& grid) {
  const int n = grid.size();
  if (c.rows() != n || c.cols() != n) throw InvalidInput("coupling matrix does not match the grid");
  std::vector<Real> k(static_cast<std::size_t>(n), 0.0);
  std::vector<int> count(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto d = static_cast<std::size_t>(grid.displacement_index(i, j));
      k[d] += c(i, j);
      ++count[d];
    }
  }
  for (std::size_t d = 0; d < k.size(); ++d) k[d] /= count[d];
  return k;
}

/// C~_k = sum_d exp(-i k.d) C(d), modes ordered nx + lx * nz.
inline std::vector<Complex> fourier_transform(const std::vector<Real>& kernel, const PeriodicGrid& grid) {
  const int n = grid.size();
  if (static_cast<int>(kernel.size()) != n) throw InvalidInput("kernel size does not match the grid");
  std::vector<Complex> out(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    const Vec3 k = grid.wavevector(m % grid.lx, m / grid.lx);
    Complex s = 0.0;
    for (int d = 0; d < n; ++d) s += std::exp(-kI * k.dot(grid.displacement(d))) * kernel[static_cast<std::size_t>(d)];
    out[static_cast<std::size_t>(m)] = s;
  }
  return out;
}

/// C(d) = (1/N) sum_k exp(i k.d) C~_k.
inline std::vector<Complex> inverse_fourier_transform(const std::vector<Complex>& ck, const PeriodicGrid& grid) {
  const int n = grid.size();
  std::vector<Complex> out(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d) {
    const Vec3 r = grid.displacement(d);
    Complex s = 0.0;
    for (int m = 0; m < n; ++m) s += std::exp(kI * grid.wavevector(m % grid.lx, m / grid.lx).dot(r)) * ck[static_cast<std::size_t>(m)];
    out[static_cast<std::size_t>(d)] = s / static_cast<Real>(n);
  }
  return out;
}

struct SpinWaveMode {
  int nx = 0;
  int nz = 0;
  Vec3 k = Vec3::Zero();
  Real cx_k = 0.0;   ///< C~^x_k
  Real cy_k = 0.0;   ///< C~^y_k
  Real eps = 0.0;    ///< hopping epsilon_k
  Real pair = 0.0;   ///< pair creation Omega_k
  Real xi2 = 0.0;    ///< epsilon^2 - Omega^2
  bool squeezable = false;  ///< k and -k coincide (f(k) = 1)

  [[nodiscard]] bool unstable() const { return xi2 < 0.0; }
  /// Bogoliubov angle theta with cosh(2 theta) = |eps|/xi (stable modes only).
  [[nodiscard]] Real bogoliubov_theta() const {
    if (xi2 <= 0.0) return std::numeric_limits<Real>::quiet_NaN();
    return 0.5 * std::acosh(std::abs(eps) / std::sqrt(xi2));
  }
  /// alpha + beta in {0, pi}: sign of Omega_k relative to eps_k.
  [[nodiscard]] Real phase_sum() const { return eps * pair >= 0.0 ? 0.0 : kPi; }
};

namespace detail {
// sin^2(xi t)/xi^2 and sin(2 xi t)/(2 xi) as entire functions of x = xi^2.
inline Real sin2_over_xi2(Real xi2, Real t) {
  const Real z = xi2 * t * t;
  if (std::abs(z) < 1e-6) return t * t * (1.0 - z / 3.0 + 2.0 * z * z / 45.0);
  if (xi2 > 0.0) {
    const Real s = std::sin(std::sqrt(xi2) * t);
    return s * s / xi2;
  }
  const Real s = std::sinh(std::sqrt(-xi2) * t);
  return s * s / (-xi2);
}
inline Real sin2xt_over_2xi(Real xi2, Real t) {
  const Real z = xi2 * t * t;
  if (std::abs(z) < 1e-6) return t * (1.0 - 2.0 * z / 3.0 + 2.0 * z * z / 15.0);
  if (xi2 > 0.0) {
    const Real x = std::sqrt(xi2);
    return std::sin(2.0 * x * t) / (2.0 * x);
  }
  const Real x = std::sqrt(-xi2);
  return std::sinh(2.0 * x * t) / (2.0 * x);
}
}  // namespace detail

class SpinWaveSpectrum {
 public:
  SpinWaveSpectrum(const XYModel& model, const PeriodicGrid& grid) : grid_(grid) {
    grid.validate();
    const auto ckx = fourier_transform(coupling_kernel(model.cx, grid), grid);
    const auto cky = fourier_transform(coupling_kernel(model.cy, grid), grid);
    const int n = grid.size();
    const Real cx0 = ckx[0].real();
    for (int m = 0; m < n; ++m) {
      SpinWaveMode md;
      md.nx = m % grid.lx;
      md.nz = m / grid.lx;
      md.k = grid.wavevector(md.nx, md.nz);
      md.cx_k = ckx[static_cast<std::size_t>(m)].real();
      md.cy_k = cky[static_cast<std::size_t>(m)].real();
      const int minus = mode_index((grid.lx - md.nx) % grid.lx, (grid.lz - md.nz) % grid.lz);
      md.eps = -4.0 * cx0 + md.cy_k + cky[static_cast<std::size_t>(minus)].real();
      md.pair = 2.0 * md.cy_k;
      md.xi2 = md.eps * md.eps - md.pair * md.pair;
      md.squeezable = minus == m;
      max_imag_ = std::max({max_imag_, std::abs(ckx[static_cast<std::size_t>(m)].imag()),
                            std::abs(cky[static_cast<std::size_t>(m)].imag())});
      modes_.push_back(md);
    }
  }

  [[nodiscard]] const std::vector<SpinWaveMode>& modes() const { return modes_; }
  [[nodiscard]] const SpinWaveMode& mode(int nx, int nz) const {
    return modes_[static_cast<std::size_t>(mode_index(nx, nz))];
  }
  [[nodiscard]] int mode_index(int nx, int nz) const {
    if (nx < 0 || nx >= grid_.lx || nz < 0 || nz >= grid_.lz) throw InvalidInput("mode index off the reciprocal grid");
    return nx + grid_.lx * nz;
  }
  [[nodiscard]] const PeriodicGrid& grid() const { return grid_; }
  /// Largest imaginary part of the coupling transforms (0 for inversion-symmetric kernels).
  [[nodiscard]] Real max_imag() const { return max_imag_; }

 private:
  PeriodicGrid grid_;
  std::vector<SpinWaveMode> modes_;
  Real max_imag_ = 0.0;
};

/// <n_k(t)> = Omega_k^2 sin^2(xi t)/xi^2 (sinh^2 for unstable modes).
inline Real mode_occupation(const SpinWaveMode& m, Real t) {
  return m.pair * m.pair * detail::sin2_over_xi2(m.xi2, t);
}

/// <|dQ_k(t, phi)|^2> with Q = X cos phi + P sin phi.
inline Real quadrature_variance(const SpinWaveMode& m, Real t, Real phi) {
  const Real s2 = detail::sin2_over_xi2(m.xi2, t);
  Real v = 0.5 + m.pair * m.pair * s2;
  if (m.squeezable) {
    v += std::cos(2.0 * phi) * m.pair * m.eps * s2 + std::sin(2.0 * phi) * m.pair * detail::sin2xt_over_2xi(m.xi2, t);
  }
  return v;
}

/// <X_k^2> and <P_k^2>.
inline Real variance_x(const SpinWaveMode& m, Real t) { return quadrature_variance(m, t, 0.0); }
inline Real variance_p(const SpinWaveMode& m, Real t) { return quadrature_variance(m, t, 0.5 * kPi); }

/// Angle in [0, pi) minimizing the quadrature variance.
inline Real optimal_angle(const SpinWaveMode& m, Real t) {
  if (!m.squeezable) throw InvalidInput("optimal_angle: mode has f(k) = 0, so no squeezing axis exists");
  const Real b = m.pair * m.eps * detail::sin2_over_xi2(m.xi2, t);
  const Real c = m.pair * detail::sin2xt_over_2xi(m.xi2, t);
  // t -> 0: variance ~ 1/2 + Omega_k t sin(2 phi), minimized at 3pi/4 for Omega_k > 0
  if (b == 0.0 && c == 0.0) return m.pair > 0.0 ? 0.75 * kPi : 0.25 * kPi;
  const Real p1 = 0.5 * std::atan2(c, b);
  const Real p2 = p1 + 0.5 * kPi;
  Real best = quadrature_variance(m, t, p1) <= quadrature_variance(m, t, p2) ? p1 : p2;
  best = std::fmod(best, kPi);
  if (best < 0.0) best += kPi;
  return best;
}

/// tau = 0.04 Delta^2 / (Gamma Omega^2).
inline Real tau_unit(Real rabi, Real detuning, Real gamma = 1.0) {
  return 0.04 * detuning * detuning / (gamma * rabi * rabi);
}

struct ThetaScanRow {
  Real theta = 0.0;
  int nx = 0;
  int nz = 0;
  Real n_k = 0.0;
  Real var_q = 0.0;  ///< at phi* (or phi = 0 for f(k) = 0)
  Real var_r = 0.0;  ///< at phi* + pi/2
  Real xi2 = 0.0;
};

/// Mode occupations and extremal quadrature variances at fixed t for a list
/// of polarization tilts theta in [0, pi/2].
inline std::vector<ThetaScanRow> theta_scan(const PeriodicGrid& grid, const DriveField& drive,
                                            const std::vector<Real>& thetas, Real t) {
  std::vector<ThetaScanRow> rows;
  for (Real th : thetas) {
    if (th < 0.0 || th > 0.5 * kPi + 1e-12) throw InvalidInput("theta_scan: theta must lie in [0, pi/2]");
    DriveField d = drive;
    d.polarization = tilted_pi_polarization(th);
    const SpinWaveSpectrum spec(periodic_xy_model(grid, d, PolarizationBasis(th)), grid);
    for (const auto& m : spec.modes()) {
      ThetaScanRow r;
      r.theta = th;
      r.nx = m.nx;
      r.nz = m.nz;
      r.n_k = mode_occupation(m, t);
      r.xi2 = m.xi2;
      const Real phi = m.squeezable ? optimal_angle(m, t) : 0.0;
      r.var_q = quadrature_variance(m, t, phi);
      r.var_r = quadrature_variance(m, t, phi + 0.5 * kPi);
      rows.push_back(r);
    }
  }
  return rows;
}

}  // namespace dipolar
