#include <cmath>

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "dipolar/effective.hpp"
#include "dipolar/observables.hpp"
#include "dipolar/xy_model.hpp"

namespace dipolar {
namespace {

AtomArray pair(Real rabi, Real det, Real a = 0.1) {
  DriveField d;
  d.rabi = rabi;
  d.detuning = det;
  return AtomArray(LevelScheme::four_level(), build_lattice(1, 2, a), d);
}

TEST(XYModel, NearFieldCoefficientsMatchClosedForm) {
  const PolarizationBasis b;
  for (Real r : {0.05, 0.1, 0.23, 0.6}) {
    const auto [cx, cy] = xy_pair(Vec3(r, 0, 0), b, 1.0, 1.0, true);
    EXPECT_NEAR(cx, cx_closed_form(r, 1.0, 1.0), 1e-12 * std::abs(cx));
    EXPECT_NEAR(cy / cx, -2.0, 1e-12);
  }
}

// mpmath values from tests/oracles/reference_values.py, in units Omega^2/(12 Delta^2)
TEST(XYModel, NearestNeighbourCoefficient) {
  const PolarizationBasis b;
  const auto [cx, cy] = xy_pair(Vec3(0.1, 0, 0), b, 1.0, 1.0, true);
  EXPECT_NEAR(12.0 * cx, 3.2615049313908968, 1e-12);
  EXPECT_NEAR(cy / cx, -2.0, 1e-12);
  const auto [fx, fy] = xy_pair(Vec3(0.1, 0, 0), b, 1.0, 1.0, false);
  EXPECT_NEAR(12.0 * fx, 3.4627918316342748, 1e-12);
  EXPECT_NEAR(fy / fx, -2.7436719269338969, 1e-12);
}

TEST(XYModel, TruncationUsesCouplingTables) {
  const AtomArray sys = pair(1.0, 10.0);
  const XYModel m = xy_truncation(sys);
  const auto [cx, cy] = xy_pair(Vec3(0.1, 0, 0), PolarizationBasis{}, 1.0, 10.0);
  EXPECT_NEAR(m.cx(0, 1), cx, 1e-15);
  EXPECT_NEAR(m.cy(1, 0), cy, 1e-15);
  EXPECT_EQ(m.cx(0, 0), 0.0);
  EXPECT_EQ(m.max_imag_coupling, 0.0);
  EXPECT_NEAR(m.jump_amplitude(0), 1.0 / 30.0, 1e-16);
  EXPECT_NEAR(m.jump_amplitude(1), -std::sqrt(2.0) / 30.0, 1e-16);
  EXPECT_NEAR(m.jump_amplitude(-1), -std::sqrt(2.0) / 30.0, 1e-16);
  // Gamma/(k0 r)^3 = 4.03 at r = 0.1
  EXPECT_FALSE(m.warning.empty());
  EXPECT_TRUE(xy_truncation(pair(1.0, 100.0)).warning.empty());
  EXPECT_FALSE(xy_truncation(pair(1.0, 0.5)).warning.empty());
}

TEST(XYModel, ResidualShrinksWithDetuning) {
  Real prev = 1.0;
  for (Real det : {12.5, 25.0, 50.0, 100.0}) {
    const AtomArray sys = pair(0.1, det);
    const auto [ratio, e0] = xy_residual(effective_operators(sys).h_eff, xy_truncation(sys));
    EXPECT_LT(ratio, prev) << det;
    prev = ratio;
  }
  EXPECT_LT(prev, 0.05);
}

TEST(XYModel, LindbladFormIsTracePreserving) {
  const AtomArray sys = pair(1.0, 10.0);
  const XYModel m = xy_truncation(sys);
  const LindbladModel lm = xy_lindblad(m);
  const CMatrix hp = CMatrix(xy_identity_jump_hamiltonian(m));
  EXPECT_NEAR((hp - hp.adjoint()).cwiseAbs().maxCoeff(), 0.0, 1e-16);
  EXPECT_EQ(lm.jumps.size(), 4u);
  LindbladRhs rhs(lm);
  CVector plus(2);
  plus << 1.0, 1.0;
  const CMatrix rho = product_density(ProductSpace(2, 2), plus);
  RowCMatrix out;
  rhs(0.0, RowCMatrix(rho), out);
  EXPECT_NEAR(std::abs(CMatrix(out).trace()), 0.0, 1e-15);
}

TEST(PauliDecomposition, PiDrivenPairHasNoSingleBodyTerms) {
  const EffectiveModel em = effective_operators(pair(0.1, -3.0));
  const PauliDecomposition d = pauli_decompose_n2(em.h_eff);
  EXPECT_LT(d.residual, 1e-14);
  EXPECT_LT(d.c_single.cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_GT(std::abs(d.c_pp), 1e-6);
}

TEST(PauliDecomposition, BellStatesAreEigenstates) {
  const EffectiveModel em = effective_operators(pair(0.1, -3.0));
  const PauliDecomposition d = pauli_decompose_n2(em.h_eff);
  CVector b1 = CVector::Zero(4), b2 = CVector::Zero(4);
  b1(0) = b1(3) = 1.0 / std::sqrt(2.0);  // |--> + |++>
  b2(1) = b2(2) = 1.0 / std::sqrt(2.0);  // |-+> + |+->
  EXPECT_NEAR((em.h_eff * b1 - d.lambda1() * b1).norm(), 0.0, 1e-15);
  EXPECT_NEAR((em.h_eff * b2 - d.lambda2() * b2).norm(), 0.0, 1e-15);
}

TEST(PauliDecomposition, RejectsMatricesOutsideTheBasis) {
  CMatrix h = CMatrix::Zero(4, 4);
  h(0, 1) = h(1, 0) = h(2, 3) = h(3, 2) = 1.0;  // 1 x sigma^x is in the basis
  EXPECT_NO_THROW(pauli_decompose_n2(h));
  h(0, 3) = 1.0;  // non-Hermitian sigma+ sigma+ part alone
  EXPECT_THROW(pauli_decompose_n2(h), NumericalError);
  EXPECT_THROW(pauli_decompose_n2(CMatrix::Zero(2, 2)), InvalidInput);
}

TEST(RenyiClosedForm, LimitingValues) {
  EXPECT_EQ(renyi_closed_form(0.3, 0.1, 0.0), 0.0);
  const Real l1 = 0.7, l2 = 0.2;
  EXPECT_NEAR(renyi_closed_form(l1, l2, kPi / (2.0 * (l1 - l2))), 1.0, 1e-15);
}

// Propagate (|l1> e^{-i l1 t} + |l2> e^{-i l2 t})/sqrt2 from |+>|+> and
// evaluate tr(rho_A^2) directly.
TEST(RenyiClosedForm, MatchesPropagatedPureState) {
  const EffectiveModel em = effective_operators(pair(0.1, -3.0));
  const PauliDecomposition d = pauli_decompose_n2(em.h_eff);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(em.h_eff);
  CVector plus(2);
  plus << 1.0, 1.0;
  const ProductSpace sp(2, 2);
  const CVector psi0 = product_state(sp, {plus, plus});
  const CVector c0 = es.eigenvectors().adjoint() * psi0;
  const Real period = kPi / std::abs(d.lambda1() - d.lambda2());
  for (Real frac : {0.0, 0.1, 0.37, 0.5, 0.81}) {
    const Real t = frac * period;
    const CVector ct = c0.array() * (-kI * es.eigenvalues().cast<Complex>().array() * t).exp();
    const CVector psi = es.eigenvectors() * ct;
    const CMatrix rho = psi * psi.adjoint();
    CMatrix ra = CMatrix::Zero(2, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) ra(a, b) += rho(2 * a + c, 2 * b + c);
    const Real direct = -std::log2((ra * ra).trace().real());
    EXPECT_NEAR(renyi_closed_form(d.lambda1(), d.lambda2(), t), direct, 1e-12) << frac;
    EXPECT_NEAR(renyi2(sp, rho, Bipartition{{0}}), direct, 1e-12);
  }
}

}  // namespace
}  // namespace dipolar
