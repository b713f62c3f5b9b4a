#include <cmath>

#include <gtest/gtest.h>

#include "dipolar/cumulant.hpp"
#include "dipolar/lindblad.hpp"
#include "dipolar/xy_model.hpp"

namespace dipolar {
namespace {

using namespace pauli_algebra;

std::vector<Real> linspace(Real a, Real b, int n) {
  std::vector<Real> t;
  for (int i = 0; i < n; ++i) t.push_back(a + (b - a) * i / (n - 1));
  return t;
}

XYModel truncated(int n, Real a, Real rabi, Real det) {
  DriveField d;
  d.rabi = rabi;
  d.detuning = det;
  return xy_truncation(AtomArray(LevelScheme::four_level(), build_lattice(1, n, a), d));
}

TEST(Cumulant, PauliProducts) {
  const PauliString x{1.0, {{0, 0}}}, y{1.0, {{0, 1}}}, z{1.0, {{0, 2}}};
  const auto xy = multiply(x, y);
  ASSERT_EQ(xy.ops.size(), 1u);
  EXPECT_EQ(xy.ops[0].second, 2);
  EXPECT_EQ(xy.coeff, kI);
  EXPECT_EQ(multiply(y, x).coeff, -kI);
  EXPECT_EQ(multiply(z, x).coeff, kI);  // sigma^z sigma^x = i sigma^y
  EXPECT_EQ(multiply(z, x).ops[0].second, 1);
  EXPECT_TRUE(multiply(x, x).ops.empty());
  const PauliString x1{2.0, {{1, 0}}};
  const auto two = multiply(x, x1);
  ASSERT_EQ(two.ops.size(), 2u);
  EXPECT_EQ(two.coeff, Complex(2.0));

  const auto c = simplify(commutator({x}, {y}));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].coeff, 2.0 * kI);
  EXPECT_TRUE(simplify(commutator({x}, {x1})).empty());
}

TEST(Cumulant, LocalOperatorExpansion) {
  const PauliSum sp = local_operator(0, sigma_plus());
  CMatrix back = CMatrix::Zero(2, 2);
  for (const auto& t : sp) back += t.coeff * (t.ops.empty() ? CMatrix(CMatrix::Identity(2, 2)) : pauli(t.ops[0].second));
  EXPECT_NEAR((back - sigma_plus()).norm(), 0.0, 1e-15);
}

TEST(Cumulant, StateIndexing) {
  const CumulantState st = CumulantState::product({{1, 0, 0}, {0, 1, 0}, {0, 0, -1}});
  EXPECT_EQ(st.data().size(), 9 + 27);
  EXPECT_EQ(st.pair(0, 0, 1, 1), 1.0);
  EXPECT_EQ(st.pair(1, 1, 0, 0), 1.0);
  EXPECT_EQ(st.pair(0, 0, 2, 2), -1.0);
  EXPECT_EQ(st.connected(0, 0, 2, 2), 0.0);
  EXPECT_EQ(st.max_bloch_excess(), 0.0);
}

// Two sites: no three-body expectations appear, so the equations are exact.
TEST(Cumulant, TwoSitesMatchMasterEquation) {
  const XYModel m = truncated(2, 0.1, 1.0, 10.0);
  const auto ts = linspace(0.0, 60.0, 13);
  std::vector<SpinMoments> cum;
  propagate_cumulant(pauli_form(m), CumulantState::product({{1, 0, 0}, {1, 0, 0}}), ts,
                     [&](Real, const CumulantState& s) { cum.push_back(s.moments()); });
  const ProductSpace space(2, 2);
  CVector plus(2);
  plus << 1.0, 1.0;
  std::vector<SpinMoments> ed;
  PropagationOptions po;
  po.ode = {1e-11, 1e-13};
  propagate(xy_lindblad(m), product_density(space, plus), ts,
            [&](Real, const CMatrix& rho) { ed.push_back(spin_moments(space, rho)); }, po);
  ASSERT_EQ(cum.size(), ts.size());
  for (std::size_t t = 0; t < ts.size(); ++t) {
    for (int i = 0; i < 2; ++i) EXPECT_NEAR((cum[t].mean[i] - ed[t].mean[i]).norm(), 0.0, 1e-8) << "t=" << ts[t];
    EXPECT_NEAR((cum[t].corr(0, 1) - ed[t].corr(0, 1)).norm(), 0.0, 1e-8) << "t=" << ts[t];
  }
  // dissipation is visible: the spins shorten
  EXPECT_LT(cum.back().mean[0](0), 0.99);
}

// Compiled equations against a direct generator evaluation for three sites:
// the exact d<O>/dt from the master equation equals the cumulant RHS
// evaluated on a product state (where the closure is exact).
TEST(Cumulant, RhsExactOnProductStates) {
  const XYModel m = truncated(3, 0.1, 1.0, 10.0);
  const std::vector<Eigen::Vector3d> bloch{{0.6, 0.0, 0.8}, {0.0, -0.6, 0.8}, {0.8, 0.6, 0.0}};
  const CumulantState st = CumulantState::product(bloch);
  RVector dy;
  CumulantRhs(pauli_form(m))(0.0, st.data(), dy);

  const ProductSpace space(3, 2);
  std::vector<CMatrix> locals;
  CMatrix rho = CMatrix::Ones(1, 1);
  for (const auto& b : bloch) {
    const CMatrix r = 0.5 * (CMatrix(CMatrix::Identity(2, 2)) + b(0) * pauli(0) + b(1) * pauli(1) + b(2) * pauli(2));
    CMatrix k(rho.rows() * 2, rho.cols() * 2);
    for (Eigen::Index i = 0; i < rho.rows(); ++i)
      for (Eigen::Index j = 0; j < rho.cols(); ++j) k.block(2 * i, 2 * j, 2, 2) = rho(i, j) * r;
    rho = k;
  }
  LindbladModel lm = xy_lindblad(m);
  LindbladRhs rhs(lm);
  RowCMatrix drho;
  rhs(0.0, RowCMatrix(rho), drho);
  const SpinMoments dm = spin_moments(space, CMatrix(drho));
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 3; ++a) EXPECT_NEAR(dy(st.mean_index(i, a)), dm.mean[i](a), 1e-12);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) EXPECT_NEAR(dy(st.pair_index(i, a, j, b)), dm.corr(i, j)(a, b), 1e-12);
}

TEST(Cumulant, MirrorSymmetricChainStaysSymmetric) {
  const int n = 5;
  const XYModel m = truncated(n, 0.1, 1.0, 10.0);
  const auto rep = propagate_cumulant(pauli_form(m), CumulantState::product(std::vector<Eigen::Vector3d>(n, {1, 0, 0})),
                                      {0.0, 40.0}, [](Real, const CumulantState&) {});
  const auto& s = rep.final_state;
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < 3; ++a) EXPECT_NEAR(s.mean(i, a), s.mean(n - 1 - i, a), 1e-9);
  EXPECT_NEAR(s.pair(0, 1, 1, 1), s.pair(n - 1, 1, n - 2, 1), 1e-9);
  EXPECT_LE(rep.max_bloch_excess, 0.0);
}

TEST(Cumulant, TrivialModelIsStatic) {
  XYModel m;
  m.cx = RMatrix::Zero(3, 3);
  m.cy = RMatrix::Zero(3, 3);
  const CumulantState init = CumulantState::product({{1, 0, 0}, {0, 0, 1}, {0.6, 0.8, 0}});
  const auto rep = propagate_cumulant(pauli_form(m, false), init, {0.0, 10.0}, [](Real, const CumulantState&) {});
  EXPECT_EQ((rep.final_state.data() - init.data()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Cumulant, RejectsMismatchedInput) {
  const XYModel m = truncated(3, 0.1, 1.0, 10.0);
  EXPECT_THROW(propagate_cumulant(pauli_form(m), CumulantState(2), {0.0, 1.0}, [](Real, const CumulantState&) {}),
               InvalidInput);
  PauliLindblad bad = pauli_form(m, false);
  bad.hamiltonian.push_back({1.0, {{0, 0}, {1, 0}, {2, 0}}});
  EXPECT_THROW(CumulantRhs{bad}, InvalidInput);
}

}  // namespace
}  // namespace dipolar
