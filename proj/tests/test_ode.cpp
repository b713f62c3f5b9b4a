#include <cmath>

#include <gtest/gtest.h>

#include "dipolar/ode.hpp"

namespace dipolar {
namespace {

TEST(Dopri5, ExponentialDecay) {
  std::vector<Real> grid{0.0, 0.5, 1.0, 3.0};
  std::vector<Real> got;
  const auto stats = integrate_dopri5([](Real, const RVector& y, RVector& dy) { dy = -y; }, RVector(RVector::Ones(1)), grid, {},
                                      [&](Real, const RVector& y) { got.push_back(y(0)); }, OdeOptions{1e-10, 1e-12});
  ASSERT_EQ(got.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(got[i], std::exp(-grid[i]), 1e-9);
  EXPECT_GT(stats.accepted, 0u);
}

TEST(Dopri5, HarmonicOscillatorOverManyPeriods) {
  RVector y0(2);
  y0 << 1.0, 0.0;
  RVector last;
  const Real t_end = 20.0 * kPi;
  integrate_dopri5(
      [](Real, const RVector& y, RVector& dy) {
        dy.resize(2);
        dy << y(1), -y(0);
      },
      y0, {0.0, t_end}, {}, [&](Real, const RVector& y) { last = y; }, OdeOptions{1e-11, 1e-13});
  EXPECT_NEAR(last(0), 1.0, 1e-8);
  EXPECT_NEAR(last(1), 0.0, 1e-8);
}

TEST(Dopri5, NeverEvaluatesAcrossBreakpoint) {
  // dy/dt = 1 before t = 1, 0 after; an RHS call past the breakpoint within
  // the first segment would be visible as a nonzero error.
  const Real tb = 1.0;
  Real max_t_before = 0.0;
  bool crossed = false;
  RVector last;
  integrate_dopri5(
      [&](Real t, const RVector&, RVector& dy) {
        dy = RVector::Constant(1, t < tb ? 1.0 : 0.0);
        if (t < tb) max_t_before = std::max(max_t_before, t);
        if (t > tb) crossed = true;
      },
      RVector(RVector::Zero(1)), {0.0, 0.37, 2.0}, {tb}, [&](Real, const RVector& y) { last = y; });
  EXPECT_NEAR(last(0), 1.0, 1e-12);
  EXPECT_TRUE(crossed);
  EXPECT_LE(max_t_before, tb);
}

TEST(Dopri5, RejectsNonIncreasingGrid) {
  auto f = [](Real, const RVector& y, RVector& dy) { dy = y; };
  auto obs = [](Real, const RVector&) {};
  EXPECT_THROW(integrate_dopri5(f, RVector(RVector::Ones(1)), {0.0, 1.0, 1.0}, {}, obs), InvalidInput);
}

TEST(Dopri5, StepLimitRaisesNumericalError) {
  OdeOptions opt;
  opt.max_steps = 5;
  auto f = [](Real, const RVector& y, RVector& dy) { dy = -100.0 * y; };
  auto obs = [](Real, const RVector&) {};
  EXPECT_THROW(integrate_dopri5(f, RVector(RVector::Ones(1)), {0.0, 100.0}, {}, obs, opt), NumericalError);
}

}  // namespace
}  // namespace dipolar
