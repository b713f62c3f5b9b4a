#pragma once

// Discrete truncated Wigner sampling for the unitary XY model.
//
// Each trajectory starts from s^x_i = 1, s^y_i, s^z_i = +-1 and follows
// ds_i/dt = 4 h_i x s_i with h_i = sum_j (C^x_ij s^x_j, C^y_ij s^y_j, 0),
// the classical limit of d sigma_i/dt = i[H, sigma_i] for
// H = sum_{i != j} (C^x sigma^x sigma^x + C^y sigma^y sigma^y).

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <mutex>
#include <tuple>
#include <utility>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dipolar/core.hpp"
#include "dipolar/ode.hpp"
#include "dipolar/xy_model.hpp"

namespace dipolar {

/// 3 x N matrix of classical spin components (rows x, y, z).
using SpinConfig = Eigen::Matrix<Real, 3, Eigen::Dynamic>;

/// Deterministic per-trajectory generator from (master seed, trajectory index).
inline std::mt19937_64 trajectory_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x5eedu};
  return std::mt19937_64(seq);
}

/// Initial phase point of trajectory `index`.
inline SpinConfig sample_initial(int n_sites, std::uint64_t seed, std::uint64_t index) {
  if (n_sites < 1) throw InvalidInput("sample_initial: need at least one site");
  auto rng = trajectory_rng(seed, index);
  std::uniform_int_distribution<int> coin(0, 1);
  SpinConfig s(3, n_sites);
  for (int i = 0; i < n_sites; ++i) {
    s(0, i) = 1.0;
    s(1, i) = coin(rng) != 0 ? 1.0 : -1.0;
    s(2, i) = coin(rng) != 0 ? 1.0 : -1.0;
  }
  return s;
}

/// Right-hand side of the classical XY equations.
class XYSpinRhs {
 public:
  explicit XYSpinRhs(const XYModel& m) : cx_(m.cx), cy_(m.cy) {}
  void operator()(Real, const SpinConfig& s, SpinConfig& ds) {
    hx_.noalias() = cx_ * s.row(0).transpose();
    hy_.noalias() = cy_ * s.row(1).transpose();
    ds.resize(3, s.cols());
    // 4 (h x s) with h = (hx, hy, 0)
    ds.row(0) = 4.0 * (hy_.transpose().array() * s.row(2).array()).matrix();
    ds.row(1) = -4.0 * (hx_.transpose().array() * s.row(2).array()).matrix();
    ds.row(2) = 4.0 * (hx_.transpose().array() * s.row(1).array() - hy_.transpose().array() * s.row(0).array()).matrix();
  }

 private:
  RMatrix cx_;
  RMatrix cy_;
  RVector hx_;
  RVector hy_;
};

/// Classical energy sum_{i != j} (C^x s^x s^x + C^y s^y s^y).
inline Real classical_energy(const XYModel& m, const SpinConfig& s) {
  const RVector sx = s.row(0).transpose();
  const RVector sy = s.row(1).transpose();
  return sx.dot(m.cx * sx) + sy.dot(m.cy * sy);
}

/// Mode k expressed through site weights: S~_z(k) = sum_i (cos_i s^z_i + sin_i s^y_i)/2,
/// S~_y(k) = sum_i (cos_i s^y_i - sin_i s^z_i)/2 with phase k.r_i.
struct ModeWeights {
  Vec3 k = Vec3::Zero();
  RVector cos_kr;
  RVector sin_kr;
};

inline ModeWeights mode_weights(const ArrayGeometry& geom, const Vec3& k) {
  ModeWeights w;
  w.k = k;
  const auto n = static_cast<Eigen::Index>(geom.size());
  w.cos_kr.resize(n);
  w.sin_kr.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Real ph = k.dot(geom.positions[static_cast<std::size_t>(i)]);
    w.cos_kr(i) = std::cos(ph);
    w.sin_kr(i) = std::sin(ph);
  }
  return w;
}

struct DtwaOptions {
  std::size_t n_traj = 10000;
  std::uint64_t seed = 1;
  int threads = 1;
  OdeOptions ode{1e-10, 1e-12};
  std::size_t block = 64;  ///< trajectories per reduction block (fixes the summation order)
};

/// Ensemble estimator of one mode at one time.
struct ModeEstimate {
  Real n_k = 0.0, n_k_se = 0.0;
  Real sz2 = 0.0, sy2 = 0.0, szy = 0.0;  ///< <S~_z^2>, <S~_y^2>, <S~_z S~_y> (symmetric)
  Real p2 = 0.0, p2_se = 0.0;            ///< <P_k^2> = (2/N) <S~_y^2>
  Real phi_star = 0.0;                   ///< angle minimizing <S~_phi^2>
  Real var_min = 0.0, var_min_se = 0.0;  ///< <S~_{phi*}^2>
  Real var_max = 0.0, var_max_se = 0.0;  ///< <S~_{phi*+pi/2}^2>
  Real wineland = 0.0, wineland_se = 0.0;            ///< N <S~_{phi*}^2> / <S_x>^2
  Real wineland_orth = 0.0, wineland_orth_se = 0.0;  ///< same at phi* + pi/2
};

struct DtwaResult {
  std::vector<Real> times;
  std::vector<Vec3> modes;
  std::vector<std::vector<ModeEstimate>> estimates;  ///< [time][mode]
  std::vector<Real> sx, sx_se;                       ///< <S_x>
  std::vector<Eigen::Vector3d> mean_sigma;           ///< site-averaged <sigma^alpha>
  Real max_norm_drift = 0.0;    ///< max_i ||s_i| - sqrt3|
  Real max_energy_drift = 0.0;  ///< |E(t) - E(0)| / sum_ij (|C^x| + |C^y|)
  std::size_t n_traj = 0;
};

namespace detail {

// Raw sums over trajectories for one (time, mode).
struct ModeSums {
  // Z = S~_z(k), Y = S~_y(k); moments Z^2, Y^2, ZY, Z^4, Z^3Y, Z^2Y^2, ZY^3, Y^4, (Z^2+Y^2)^2
  std::array<Real, 9> m{};
  void add(const ModeSums& o) {
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += o.m[i];
  }
};

struct TimeSums {
  Real sx = 0.0, sx2 = 0.0;
  Eigen::Vector3d sigma = Eigen::Vector3d::Zero();
  std::vector<ModeSums> modes;
};

struct BlockSums {
  std::vector<TimeSums> times;
  Real norm_drift = 0.0;
  Real energy_drift = 0.0;
};

inline Real se_from(Real sum, Real sum_sq, Real n) {
  if (n < 2) return 0.0;
  const Real mean = sum / n;
  const Real var = std::max(0.0, (sum_sq / n - mean * mean) * n / (n - 1.0));
  return std::sqrt(var / n);
}

}  // namespace detail

/// Runs the ensemble and reduces spin-wave estimators for the given modes.
inline DtwaResult run_dtwa(const XYModel& model, const ArrayGeometry& geom, const std::vector<Vec3>& modes,
                           const std::vector<Real>& t_grid, const DtwaOptions& opt = {}) {
  const int n = model.n();
  if (static_cast<int>(geom.size()) != n) throw InvalidInput("run_dtwa: geometry does not match the model");
  if (opt.n_traj < 1) throw InvalidInput("run_dtwa: n_traj must be >= 1");
  if (t_grid.empty()) throw InvalidInput("run_dtwa: empty time grid");
  if (!model.cx.allFinite() || !model.cy.allFinite()) throw InvalidInput("run_dtwa: couplings must be finite");
  const std::size_t nt = t_grid.size();
  const std::size_t nk = modes.size();
  std::vector<ModeWeights> weights;
  for (const Vec3& k : modes) weights.push_back(mode_weights(geom, k));
  const Real escale = std::max(1e-300, model.cx.cwiseAbs().sum() + model.cy.cwiseAbs().sum());

  const std::size_t block = std::max<std::size_t>(1, opt.block);
  const std::size_t n_blocks = (opt.n_traj + block - 1) / block;
  std::vector<detail::BlockSums> blocks(n_blocks);

  auto run_block = [&](std::size_t b) {
    detail::BlockSums& bs = blocks[b];
    bs.times.assign(nt, detail::TimeSums{});
    for (auto& ts : bs.times) ts.modes.assign(nk, detail::ModeSums{});
    XYSpinRhs rhs(model);
    const std::size_t lo = b * block;
    const std::size_t hi = std::min(opt.n_traj, lo + block);
    for (std::size_t tr = lo; tr < hi; ++tr) {
      SpinConfig s0 = sample_initial(n, opt.seed, tr);
      const Real e0 = classical_energy(model, s0);
      std::size_t ti = 0;
      auto observe = [&](Real, const SpinConfig& s) {
        detail::TimeSums& ts = bs.times[ti++];
        const Real sx = 0.5 * s.row(0).sum();
        ts.sx += sx;
        ts.sx2 += sx * sx;
        ts.sigma += s.rowwise().sum() / static_cast<Real>(n);
        for (std::size_t m = 0; m < nk; ++m) {
          const auto& w = weights[m];
          const Real z = 0.5 * (w.cos_kr.dot(s.row(2).transpose()) + w.sin_kr.dot(s.row(1).transpose()));
          const Real y = 0.5 * (w.cos_kr.dot(s.row(1).transpose()) - w.sin_kr.dot(s.row(2).transpose()));
          const Real z2 = z * z, y2 = y * y;
          auto& a = ts.modes[m].m;
          a[0] += z2;
          a[1] += y2;
          a[2] += z * y;
          a[3] += z2 * z2;
          a[4] += z2 * z * y;
          a[5] += z2 * y2;
          a[6] += z * y2 * y;
          a[7] += y2 * y2;
          a[8] += (z2 + y2) * (z2 + y2);
        }
        for (int i = 0; i < n; ++i) bs.norm_drift = std::max(bs.norm_drift, std::abs(s.col(i).norm() - std::sqrt(3.0)));
        bs.energy_drift = std::max(bs.energy_drift, std::abs(classical_energy(model, s) - e0) / escale);
      };
      integrate_dopri5([&rhs](Real t, const SpinConfig& y, SpinConfig& dy) { rhs(t, y, dy); }, s0, t_grid, {},
                       observe, opt.ode);
    }
  };

  const int threads = std::max(1, opt.threads);
  if (threads == 1 || n_blocks == 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < n_blocks; b = next++) {
          try {
            run_block(b);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  // Fixed-order reduction over blocks.
  detail::BlockSums total;
  total.times.assign(nt, detail::TimeSums{});
  for (auto& ts : total.times) ts.modes.assign(nk, detail::ModeSums{});
  for (const auto& bs : blocks) {
    for (std::size_t t = 0; t < nt; ++t) {
      total.times[t].sx += bs.times[t].sx;
      total.times[t].sx2 += bs.times[t].sx2;
      total.times[t].sigma += bs.times[t].sigma;
      for (std::size_t m = 0; m < nk; ++m) total.times[t].modes[m].add(bs.times[t].modes[m]);
    }
    total.norm_drift = std::max(total.norm_drift, bs.norm_drift);
    total.energy_drift = std::max(total.energy_drift, bs.energy_drift);
  }

  DtwaResult res;
  res.times = t_grid;
  res.modes = modes;
  res.n_traj = opt.n_traj;
  res.max_norm_drift = total.norm_drift;
  res.max_energy_drift = total.energy_drift;
  const auto ntr = static_cast<Real>(opt.n_traj);
  const auto nn = static_cast<Real>(n);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& ts = total.times[t];
    const Real sx = ts.sx / ntr;
    const Real sx_se = detail::se_from(ts.sx, ts.sx2, ntr);
    res.sx.push_back(sx);
    res.sx_se.push_back(sx_se);
    res.mean_sigma.push_back(ts.sigma / ntr);
    std::vector<ModeEstimate> row;
    for (std::size_t m = 0; m < nk; ++m) {
      const auto& a = ts.modes[m].m;
      ModeEstimate e;
      e.sz2 = a[0] / ntr;
      e.sy2 = a[1] / ntr;
      e.szy = a[2] / ntr;
      e.n_k = (e.sz2 + e.sy2) / nn - 0.5;
      e.n_k_se = detail::se_from(a[0] + a[1], a[8], ntr) / nn;
      e.p2 = 2.0 * e.sy2 / nn;
      e.p2_se = 2.0 * detail::se_from(a[1], a[7], ntr) / nn;
      // S~_phi = -S~_z cos phi + S~_y sin phi; covariance in the (-Z, Y) basis.
      Eigen::Matrix2d cov;
      cov << e.sz2, -e.szy, -e.szy, e.sy2;
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
      const Eigen::Vector2d v = es.eigenvectors().col(0);
      e.phi_star = std::atan2(v(1), v(0));
      if (e.phi_star < 0.0) e.phi_star += kPi;
      if (e.phi_star >= kPi) e.phi_star -= kPi;
      auto moment_se = [&](Real phi) {
        const Real ca = -std::cos(phi), sb = std::sin(phi);  // S~_phi = ca Z + sb Y
        const Real s2 = ca * ca * a[0] + 2.0 * ca * sb * a[2] + sb * sb * a[1];
        const Real s4 = std::pow(ca, 4) * a[3] + 4.0 * std::pow(ca, 3) * sb * a[4] + 6.0 * ca * ca * sb * sb * a[5] +
                        4.0 * ca * std::pow(sb, 3) * a[6] + std::pow(sb, 4) * a[7];
        return std::pair<Real, Real>{s2 / ntr, detail::se_from(s2, s4, ntr)};
      };
      std::tie(e.var_min, e.var_min_se) = moment_se(e.phi_star);
      std::tie(e.var_max, e.var_max_se) = moment_se(e.phi_star + 0.5 * kPi);
      const Real sx2 = sx * sx;
      auto ratio_se = [&](Real num, Real num_se) {
        const Real r = nn * num / sx2;
        const Real rel = std::sqrt(std::pow(num_se / num, 2) + std::pow(2.0 * sx_se / sx, 2));
        return std::pair<Real, Real>{r, std::abs(r) * rel};
      };
      std::tie(e.wineland, e.wineland_se) = ratio_se(e.var_min, e.var_min_se);
      std::tie(e.wineland_orth, e.wineland_orth_se) = ratio_se(e.var_max, e.var_max_se);
      row.push_back(e);
    }
    res.estimates.push_back(std::move(row));
  }
  return res;
}

}  // namespace dipolar
