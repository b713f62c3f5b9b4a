#include <cmath>

#include <gtest/gtest.h>

#include "dipolar/effective.hpp"
#include "dipolar/observables.hpp"

namespace dipolar {
namespace {

AtomArray chain(const LevelScheme& s, int n, Real rabi, Real det, Real a = 0.1) {
  DriveField d;
  d.rabi = rabi;
  d.detuning = det;
  return AtomArray(s, build_lattice(1, n, a), d);
}

// Second-order shift of |g> through |e> with complex energy -Delta - i/2:
// E = -Re(Omega^2 / (-Delta - i/2)) = Omega^2 Delta / (Delta^2 + 1/4).
TEST(EffectiveModel, SingleTwoLevelAtomLightShiftAndPumpingRate) {
  for (Real det : {-3.0, 0.7, 10.0}) {
    const Real rabi = 0.1;
    const EffectiveModel em = effective_operators(chain(LevelScheme::two_level(), 1, rabi, det));
    ASSERT_EQ(em.h_eff.rows(), 1);
    EXPECT_NEAR(em.h_eff(0, 0).real(), rabi * rabi * det / (det * det + 0.25), 1e-15);
    // L = D^- H_NH^{-1} V_+ = Omega / (Delta + i/2); scattering rate 2 (1/2) |L|^2
    ASSERT_EQ(em.jumps.size(), 1u);
    EXPECT_NEAR(std::norm(em.jumps[0](0, 0)), rabi * rabi / (det * det + 0.25), 1e-15);
  }
}

TEST(EffectiveModel, PiDrivenFourLevelAtomHasNoStarkSplitting) {
  // |C_{+-1/2}^0| are equal, so both ground sublevels shift alike
  const EffectiveModel em = effective_operators(chain(LevelScheme::four_level(), 1, 0.1, -3.0));
  ASSERT_EQ(em.h_eff.rows(), 2);
  EXPECT_NEAR(std::abs(em.h_eff(0, 0) - em.h_eff(1, 1)), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(em.h_eff(0, 1)), 0.0, 1e-16);
  EXPECT_NEAR(em.h_eff(0, 0).real(), 0.01 * (-3.0) / 9.25 / 3.0, 1e-15);
}

TEST(EffectiveModel, OperatorsAreHermitianAndScaleAsRabiSquared) {
  const EffectiveModel a = effective_operators(chain(LevelScheme::four_level(), 3, 0.1, -3.0));
  const EffectiveModel b = effective_operators(chain(LevelScheme::four_level(), 3, 0.05, -3.0));
  EXPECT_NEAR((a.h_eff - a.h_eff.adjoint()).cwiseAbs().maxCoeff(), 0.0, 1e-16);
  EXPECT_NEAR((a.h_eff - 4.0 * b.h_eff).cwiseAbs().maxCoeff(), 0.0, 1e-15);
  ASSERT_EQ(a.jumps.size(), b.jumps.size());
  for (std::size_t k = 0; k < a.jumps.size(); ++k) {
    EXPECT_NEAR((a.jumps[k] - 2.0 * b.jumps[k]).cwiseAbs().maxCoeff(), 0.0, 1e-15);
  }
  EXPECT_EQ(a.ground_space.dim(), 8);
  EXPECT_GT(a.reciprocal_condition, 1e-6);
}

TEST(EffectiveModel, ZeroDriveGivesZeroGenerator) {
  const EffectiveModel em = effective_operators(chain(LevelScheme::four_level(), 2, 0.0, -3.0));
  EXPECT_EQ(em.h_eff.cwiseAbs().maxCoeff(), 0.0);
  for (const auto& l : em.jumps) EXPECT_EQ(l.cwiseAbs().maxCoeff(), 0.0);
}

TEST(EffectiveModel, RescaledTrajectoryIsInvariant) {
  for (int n : {2, 3}) {
    const EffectiveModel a = effective_operators(chain(LevelScheme::four_level(), n, 0.1, -3.0));
    const EffectiveModel b = effective_operators(chain(LevelScheme::four_level(), n, 0.05, -3.0));
    const CMatrix rho0 = ground_product_density(a, default_ground_state(LevelScheme::four_level()));
    PropagationOptions opt;
    opt.ode.rtol = 1e-11;
    opt.ode.atol = 1e-13;
    std::vector<CMatrix> ra, rb;
    const std::vector<Real> grid{0.0, 250.0, 500.0};
    propagate(a.lindblad(), rho0, grid, [&](Real, const CMatrix& r) { ra.push_back(r); }, opt);
    propagate(b.lindblad(), rho0, {0.0, 1000.0, 2000.0}, [&](Real, const CMatrix& r) { rb.push_back(r); }, opt);
    for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_LT((ra[k] - rb[k]).cwiseAbs().maxCoeff(), 1e-8) << n;
  }
}

TEST(EffectiveModel, DissipationOnlyKeepsTrace) {
  const EffectiveModel em = effective_operators(chain(LevelScheme::four_level(), 2, 0.1, -3.0));
  const CMatrix rho0 = ground_product_density(em, default_ground_state(LevelScheme::four_level()));
  const auto rep = propagate(em.lindblad(false, true), rho0, {0.0, 500.0, 1000.0}, [](Real, const CMatrix&) {});
  EXPECT_LT(rep.max_trace_error, 1e-10);
  EXPECT_GT(rep.min_eigenvalue, -1e-9);
}

TEST(EffectiveModel, DriveEnvelopeEntersSquared) {
  DriveField d;
  d.rabi = 0.1;
  d.detuning = -3.0;
  d.pulse = {PulseShape::kOffInRegimeII, 100.0};
  const EffectiveModel em = effective_operators(AtomArray(LevelScheme::four_level(), build_lattice(1, 2, 0.1), d));
  const LindbladModel m = em.lindblad();
  EXPECT_EQ(m.drive_scale(50.0), 1.0);
  EXPECT_EQ(m.drive_scale(150.0), 0.0);
  EXPECT_EQ(m.dissipator_scale(150.0), 0.0);
  EXPECT_EQ(m.breakpoints, std::vector<Real>{100.0});
}

TEST(EffectiveModel, EmbeddingPreservesGroundBlock) {
  const AtomArray sys = chain(LevelScheme::four_level(), 2, 0.1, -3.0);
  const EffectiveModel em = effective_operators(sys);
  const CMatrix g = ground_product_density(em, default_ground_state(sys.scheme));
  const CMatrix full = embed_ground_state(sys, g);
  const CMatrix direct = product_density(sys.space(), default_local_state(sys.scheme));
  EXPECT_NEAR((full - direct).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

}  // namespace
}  // namespace dipolar
