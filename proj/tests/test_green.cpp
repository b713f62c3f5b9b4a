#include <cmath>

#include <gtest/gtest.h>

#include "dipolar/green.hpp"

namespace dipolar {
namespace {

// 30-digit mpmath evaluation of the closed-form tensor (tests/oracles/reference_values.py).
struct Reference {
  Vec3 r;
  int q, qp;
  Complex delta;
  Real gamma;  // NaN when not tabulated
};

TEST(Green, MatchesHighPrecisionOracle) {
  const Real nan = std::numeric_limits<Real>::quiet_NaN();
  const std::vector<Reference> refs{
      {Vec3(0.1, 0, 0), 1, 1, 2.2642398396137603, 0.47094275074591031},
      {Vec3(0.1, 0, 0), 1, -1, -4.8613337133394664, -0.0095943265547723903},
      {Vec3(0.1, 0, 0), -1, 1, -4.8613337133394664, -0.0095943265547723903},
      {Vec3(0.1, 0, 0), 0, 0, -2.5970938737257061, 0.46134842419113792},
      {Vec3(0, 0, 0.1), 0, 0, 7.1255735529532267, 0.4805370773006827},
      {Vec3(0.2, 0, 0.3), 1, 1, -0.21753471956662972, nan},
      {Vec3(0.2, 0, 0.3), 1, -1, -0.065363759090557746, nan},
      {Vec3(0.2, 0, 0.3), 0, 1, -0.13865747189033167, nan},
      {Vec3(0.2, 0, 0.3), 0, 0, 0.011238437250322395, nan},
  };
  for (const auto& ref : refs) {
    const ArrayGeometry g = geometry_from_positions({Vec3::Zero(), ref.r});
    const DipoleCouplings c(g, PolarizationBasis{});
    EXPECT_NEAR(std::abs(c.delta(0, 1, ref.q, ref.qp) - ref.delta), 0.0, 1e-13) << ref.r.transpose();
    EXPECT_NEAR(std::abs(c.delta(1, 0, ref.q, ref.qp) - ref.delta), 0.0, 1e-13);
    if (!std::isnan(ref.gamma)) EXPECT_NEAR(c.gamma(0, 1, ref.q, ref.qp).real(), ref.gamma, 1e-13);
  }
}

TEST(Green, SelfTermsConvention) {
  const DipoleCouplings c(build_lattice(1, 3, 0.1), PolarizationBasis{});
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(c.delta_block(i, i), CMat3::Zero());
    EXPECT_NEAR((c.gamma_block(i, i) - 0.5 * CMat3::Identity()).norm(), 0.0, 1e-15);
  }
}

TEST(Green, NearFieldScalingAndConstantImaginaryPart) {
  const Vec3 n(1.0, 0.0, 0.0);
  const Real r1 = 1e-3, r2 = 2e-3;
  const CMat3 g1 = green_tensor(r1 * n), g2 = green_tensor(r2 * n);
  // Re G ~ 1/(k0 r)^3
  EXPECT_NEAR(g1(1, 1).real() / g2(1, 1).real(), 8.0, 1e-3);
  // Im G -> (Gamma/2) 1
  EXPECT_NEAR(g1(1, 1).imag(), 0.5, 1e-5);
  EXPECT_NEAR(g1(0, 0).imag(), 0.5, 1e-5);
  EXPECT_NEAR(std::abs(g1(0, 1)), 0.0, 1e-15);
}

TEST(Green, FarFieldDecaysAsInverseDistance) {
  const Vec3 n(0.6, 0.0, 0.8);
  // transverse components fall off as 1/(k0 r); compare envelopes at commensurate distances
  const Real ra = 100.0, rb = 200.0;  // integer wavelengths: e^{i k0 r} = 1
  const CMat3 ga = green_tensor(ra * n), gb = green_tensor(rb * n);
  EXPECT_NEAR(ga(1, 1).real() / gb(1, 1).real(), 2.0, 1e-3);
}

TEST(Green, AllRealInPlanarGeometry) {
  const DipoleCouplings c(build_lattice(2, 3, 0.1), PolarizationBasis{});
  for (std::size_t i = 0; i < 9; ++i) {
    for (std::size_t j = 0; j < 9; ++j) {
      if (i == j) continue;
      EXPECT_EQ(c.delta(i, j, 1, 1).imag(), 0.0);
      EXPECT_EQ(c.delta(i, j, 1, -1).imag(), 0.0);
      EXPECT_NEAR(std::abs(c.delta(i, j, 1, -1) - c.delta(j, i, 1, -1)), 0.0, 1e-15);
    }
  }
}

TEST(Green, RateMatrixPositiveSemidefinite) {
  for (Real a : {0.05, 0.1, 0.3}) {
    const DipoleCouplings c(build_lattice(2, 3, a), PolarizationBasis{});
    EXPECT_GT(c.min_rate_eigenvalue(), -1e-12) << a;
    const CMatrix m = c.gamma_matrix();
    EXPECT_NEAR((m - m.adjoint()).cwiseAbs().maxCoeff(), 0.0, 1e-15);
  }
}

TEST(Green, NearFieldOnlyHasNoTransversePart) {
  const Vec3 r(0.1, 0.0, 0.0);
  const CMat3 g = green_tensor(r, 1.0, true);
  const Real x = kK0 * 0.1;
  // (1 - 3 rr) (-cos x / x^3) * 3/4 along the axis
  EXPECT_NEAR(g(0, 0).real(), 0.75 * 2.0 * std::cos(x) / (x * x * x), 1e-13);
  EXPECT_NEAR(g(1, 1).real(), -0.75 * std::cos(x) / (x * x * x), 1e-13);
}

TEST(Green, RejectsCoincidentPoints) {
  EXPECT_THROW(green_tensor(Vec3::Zero()), InvalidInput);
}

}  // namespace
}  // namespace dipolar
