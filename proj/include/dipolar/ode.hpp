#pragma once

// Adaptive Dormand-Prince 5(4) integrator for Eigen-valued states.
//
// The right-hand side has the form f(t, y, dydt) and writes into dydt.
// Integration runs piecewise between breakpoints (where the RHS may jump) and
// lands exactly on every requested output time.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "dipolar/core.hpp"

namespace dipolar {

struct OdeOptions {
  Real rtol = 1e-8;
  Real atol = 1e-10;
  Real h_initial = 0.0;  ///< 0 picks a starting step automatically
  Real h_max = std::numeric_limits<Real>::infinity();
  std::size_t max_steps = 50'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_calls = 0;
};

namespace detail {

template <class State>
Real error_norm(const State& err, const State& y0, const State& y1, Real rtol, Real atol) {
  const auto scale = (atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).eval();
  const Real s = (err.cwiseAbs().array() / scale).square().sum();
  return std::sqrt(s / static_cast<Real>(err.size()));
}

}  // namespace detail

/// Integrates y from t_out.front() through every t_out entry, calling
/// observe(t, y) at each. Breakpoints inside the range split the integration
/// so no step straddles a discontinuity of the RHS; within a segment the RHS
/// is never evaluated at or beyond the segment end.
template <class State, class Rhs, class Observer>
OdeStats integrate_dopri5(Rhs&& f, State y, const std::vector<Real>& t_out, std::vector<Real> breakpoints,
                          Observer&& observe, const OdeOptions& opt = {}) {
  if (t_out.empty()) return {};
  for (std::size_t i = 1; i < t_out.size(); ++i) {
    if (!(t_out[i] > t_out[i - 1])) throw InvalidInput("time grid must be strictly increasing");
  }
  constexpr Real c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr Real a21 = 1.0 / 5;
  constexpr Real a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr Real a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr Real a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr Real a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
  constexpr Real b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr Real e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

  OdeStats stats;
  const Real t_begin = t_out.front();
  const Real t_end = t_out.back();
  std::sort(breakpoints.begin(), breakpoints.end());

  State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, ytmp = y, ynew = y, err = y;
  Real t = t_begin;
  observe(t, y);
  std::size_t next_out = 1;

  Real seg_end = t_end;
  auto next_segment_end = [&](Real from) {
    for (Real b : breakpoints) {
      if (b > from && b < t_end) return b;
    }
    return t_end;
  };
  seg_end = next_segment_end(t);
  auto eval = [&](Real tt, const State& yy, State& out) {
    // Clamp strictly inside the segment: the RHS may jump at seg_end.
    const Real te = std::min(tt, std::nextafter(seg_end, t));
    f(te, yy, out);
    ++stats.rhs_calls;
  };

  eval(t, y, k1);
  Real h = opt.h_initial;
  if (!(h > 0.0)) {
    const Real d0 = detail::error_norm(y, y, y, opt.rtol, opt.atol);
    const Real d1 = detail::error_norm(k1, y, y, opt.rtol, opt.atol);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, opt.h_max);
  }
  Real err_prev = 1e-4;

  while (next_out < t_out.size()) {
    const Real target = std::min(t_out[next_out], seg_end);
    Real h_try = std::min(h, target - t);
    const bool clipped = h_try < h;
    if (stats.accepted + stats.rejected >= opt.max_steps) throw NumericalError("ODE: too many steps");
    if (h_try < 1e-14 * std::max(1.0, std::abs(t))) throw NumericalError("ODE: step size underflow");

    ytmp = y + h_try * a21 * k1;
    eval(t + c2 * h_try, ytmp, k2);
    ytmp = y + h_try * (a31 * k1 + a32 * k2);
    eval(t + c3 * h_try, ytmp, k3);
    ytmp = y + h_try * (a41 * k1 + a42 * k2 + a43 * k3);
    eval(t + c4 * h_try, ytmp, k4);
    ytmp = y + h_try * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    eval(t + c5 * h_try, ytmp, k5);
    ytmp = y + h_try * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    eval(t + h_try, ytmp, k6);
    ynew = y + h_try * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    eval(t + h_try, ynew, k7);
    err = h_try * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const Real en = detail::error_norm(err, y, ynew, opt.rtol, opt.atol);

    if (en <= 1.0) {
      t = (target - (t + h_try) <= 1e-13 * std::max(1.0, std::abs(target))) ? target : t + h_try;
      y.swap(ynew);
      k1.swap(k7);
      ++stats.accepted;
      // PI controller (Hairer's beta = 0.04 variant).
      const Real fac = std::clamp(0.9 * std::pow(std::max(en, 1e-10), -0.17) * std::pow(err_prev, 0.04), 0.2, 5.0);
      const Real h_new = std::min(h_try * fac, opt.h_max);
      // A step clipped to an output time does not shrink the running step.
      h = clipped ? std::max(h, h_new) : h_new;
      err_prev = std::max(en, 1e-4);
      if (t == target) {
        if (t == seg_end && seg_end < t_end) {
          seg_end = next_segment_end(t);
          eval(t, y, k1);  // RHS changed across the breakpoint
        }
        if (t == t_out[next_out]) {
          observe(t, y);
          ++next_out;
        }
      }
    } else {
      ++stats.rejected;
      if (!std::isfinite(en)) {
        h = 0.1 * h_try;
      } else {
        h = h_try * std::max(0.2, 0.9 * std::pow(en, -0.2));
      }
    }
  }
  return stats;
}

}  // namespace dipolar
