#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "dipolar/effective.hpp"
#include "dipolar/full_model.hpp"

namespace dipolar {
namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix random_density(Eigen::Index dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<Real> n;
  CMatrix a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = Complex(n(rng), n(rng));
  CMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

/// Dense Lindbladian applied directly: -i[H, rho] + sum_ab G_ab (2 L_b rho L_a^+ - {L_a^+ L_b, rho}).
CMatrix dense_lindblad(const CMatrix& h, const std::vector<CMatrix>& l, const CMatrix& g, const CMatrix& rho) {
  CMatrix out = -kI * (h * rho - rho * h);
  for (std::size_t a = 0; a < l.size(); ++a) {
    for (std::size_t b = 0; b < l.size(); ++b) {
      const Complex r = g(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      if (r == Complex(0.0)) continue;
      const CMatrix lab = l[a].adjoint() * l[b];
      out += r * (2.0 * l[b] * rho * l[a].adjoint() - lab * rho - rho * lab);
    }
  }
  return out;
}

CMatrix apply_rhs(const LindbladModel& m, const CMatrix& rho, Real t = 0.0) {
  LindbladRhs rhs(m);
  RowCMatrix out;
  rhs(t, RowCMatrix(rho), out);
  return out;
}

TEST(FullModel, SingleAtomHasNoDipolarTermAndDecaysAtUnitRate) {
  DriveField d;
  d.rabi = 0.0;
  d.detuning = -3.0;
  const AtomArray sys(LevelScheme::two_level(), build_lattice(1, 1, 0.1), d);
  const DipolarTerms dd = build_dipolar_terms(sys);
  EXPECT_EQ(dd.hamiltonian.nonZeros(), 0);
  const LindbladModel m = build_full_model(sys);
  CMatrix rho = CMatrix::Zero(2, 2);
  rho(1, 1) = 1.0;
  std::vector<Real> grid{0.0, 0.5, 1.0, 2.0};
  std::vector<Real> pe;
  propagate(m, rho, grid, [&](Real, const CMatrix& r) { pe.push_back(r(1, 1).real()); });
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(pe[k], std::exp(-grid[k]), 1e-7);
}

TEST(FullModel, FourLevelSingleAtomDecaysAtUnitRateFromEachSublevel) {
  DriveField d;
  d.detuning = 1.0;
  const AtomArray sys(LevelScheme::four_level(), build_lattice(1, 1, 0.1), d);
  const LindbladModel m = build_full_model(sys);
  for (int e : {2, 3}) {
    CMatrix rho = CMatrix::Zero(4, 4);
    rho(e, e) = 1.0;
    const CMatrix drho = apply_rhs(m, rho);
    EXPECT_NEAR(drho(e, e).real(), -1.0, 1e-14);
  }
}

TEST(FullModel, ZeroDriveHamiltonianIsDiagonalWithDetuningPerExcitation) {
  DriveField d;
  d.rabi = 0.0;
  d.detuning = -3.0;
  const AtomArray sys(LevelScheme::four_level(), build_lattice(1, 3, 0.1), d);
  const DriveHamiltonian h = build_drive_hamiltonian(sys);
  const ProductSpace sp = sys.space();
  const CMatrix h0 = CMatrix(h.detuning) + CMatrix(h.drive);
  for (Eigen::Index s = 0; s < sp.dim(); ++s) {
    EXPECT_NEAR(std::abs(h0(s, s) - Complex(3.0 * excitation_count(sp, sys.scheme, s))), 0.0, 1e-14);
  }
  EXPECT_NEAR((h0 - CMatrix(h0.diagonal().asDiagonal())).norm(), 0.0, 1e-14);
}

TEST(FullModel, PiDriveOnlyCouplesQZero) {
  DriveField d;
  d.rabi = 0.1;
  d.detuning = -3.0;
  const AtomArray sys(LevelScheme::four_level(), build_lattice(1, 1, 0.1), d);
  const CMatrix v = CMatrix(build_drive_hamiltonian(sys).raising);
  const CMatrix up0 = sys.scheme.raising(0).cast<Complex>();
  EXPECT_NEAR((v + 0.1 * up0).norm(), 0.0, 1e-15);
}

TEST(FullModel, DarkGroundManifoldWithoutDrive) {
  DriveField d;
  d.rabi = 0.0;
  d.detuning = -3.0;
  const AtomArray sys(LevelScheme::four_level(), build_lattice(1, 2, 0.1), d);
  const LindbladModel m = build_full_model(sys);
  const CMatrix rho0 = product_density(sys.space(), default_local_state(sys.scheme));
  EXPECT_NEAR(apply_rhs(m, rho0).cwiseAbs().maxCoeff(), 0.0, 1e-15);
  CMatrix last;
  propagate(m, rho0, {0.0, 100.0}, [&](Real, const CMatrix& r) { last = r; });
  EXPECT_NEAR((last - rho0).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(FullModel, OrthogonalDipolesExchangePhotons) {
  DriveField d;
  d.rabi = 0.1;
  d.detuning = -3.0;
  const AtomArray sys(LevelScheme::four_level(), build_lattice(1, 2, 0.1), d);
  const CMatrix hdd = CMatrix(build_dipolar_terms(sys).hamiltonian);
  const ProductSpace sp = sys.space();
  // |e_{+1/2}, g_{+1/2}> <- |g_{-1/2}, e_{-1/2}> needs D^+_{+1} on atom 0 and D^-_{-1} on atom 1
  const auto from = sp.index({0, 2});  // atom 0 in g_{-1/2}, atom 1 in e_{-1/2}
  const auto to = sp.index({3, 1});    // atom 0 in e_{+1/2}, atom 1 in g_{+1/2}
  const Complex expected = -sys.couplings.delta(0, 1, 1, -1) * sys.scheme.cg(-1, 1) * sys.scheme.cg(1, -1);
  EXPECT_GT(std::abs(expected), 1.0);
  EXPECT_NEAR(std::abs(hdd(to, from) - expected), 0.0, 1e-13);
}

// Independent two-level implementation: scalar dipoles along Z with
// coupling G_zz(r_ij), assembled from 2x2 matrices with Kronecker products.
TEST(FullModel, TwoLevelPairMatchesScalarDipoleModel) {
  const Real a = 0.1, rabi = 0.3, det = -1.5;
  DriveField d;
  d.rabi = rabi;
  d.detuning = det;
  const AtomArray sys(LevelScheme::two_level(), build_lattice(1, 2, a), d);

  const CMatrix id = CMatrix::Identity(2, 2);
  CMatrix sp = CMatrix::Zero(2, 2);
  sp(1, 0) = 1.0;
  const CMatrix sm = sp.adjoint();
  const CMatrix pe = sp * sm;
  const CMat3 g = green_tensor(Vec3(a, 0, 0));
  const Complex gzz = g(2, 2);
  const std::array<CMatrix, 2> s_minus{kron(sm, id), kron(id, sm)};
  CMatrix h = -det * (kron(pe, id) + kron(id, pe)) - rabi * (kron(sp + sm, id) + kron(id, sp + sm));
  h -= gzz.real() * (s_minus[0].adjoint() * s_minus[1] + s_minus[1].adjoint() * s_minus[0]);
  CMatrix rates(2, 2);
  rates << 0.5, gzz.imag(), gzz.imag(), 0.5;
  const std::vector<CMatrix> jumps{s_minus[0], s_minus[1]};

  const LindbladModel m = build_full_model(sys);
  for (unsigned seed : {1u, 2u, 3u}) {
    const CMatrix rho = random_density(4, seed);
    EXPECT_NEAR((apply_rhs(m, rho) - dense_lindblad(h, jumps, rates, rho)).cwiseAbs().maxCoeff(), 0.0, 1e-12);
  }

  // Liouvillian spectrum route for the trajectory
  CMatrix liou(16, 16);
  for (int k = 0; k < 16; ++k) {
    CMatrix e = CMatrix::Zero(4, 4);
    e(k % 4, k / 4) = 1.0;
    const CMatrix col = dense_lindblad(h, jumps, rates, e);
    liou.col(k) = Eigen::Map<const CVector>(col.data(), 16);
  }
  Eigen::ComplexEigenSolver<CMatrix> es(liou);
  const CMatrix rho0 = product_density(sys.space(), default_local_state(sys.scheme));
  const CVector c0 = es.eigenvectors().partialPivLu().solve(Eigen::Map<const CVector>(rho0.data(), 16));
  std::vector<Real> grid{0.0, 1.0, 5.0, 20.0};
  std::size_t k = 0;
  PropagationOptions opt;
  opt.ode.rtol = 1e-10;
  opt.ode.atol = 1e-12;
  propagate(
      m, rho0, grid,
      [&](Real t, const CMatrix& r) {
        const CVector ct = (es.eigenvalues() * t).array().exp() * c0.array();
        const CVector v = es.eigenvectors() * ct;
        EXPECT_NEAR((r - Eigen::Map<const CMatrix>(v.data(), 4, 4)).cwiseAbs().maxCoeff(), 0.0, 1e-8) << t;
        ++k;
      },
      opt);
  EXPECT_EQ(k, grid.size());
}

TEST(FullModel, RhsMatchesDenseFormulaForFourLevelPair) {
  DriveField d;
  d.rabi = 0.2;
  d.detuning = 2.0;
  d.polarization = tilted_pi_polarization(0.4);
  const AtomArray sys(LevelScheme::four_level(), build_lattice(1, 2, 0.15), d, PolarizationBasis(0.4));
  const LindbladModel m = build_full_model(sys);
  std::vector<CMatrix> jumps;
  for (const auto& l : m.jumps) jumps.emplace_back(l);
  const CMatrix h = CMatrix(m.h_static) + CMatrix(m.h_drive);
  for (unsigned seed : {4u, 5u}) {
    const CMatrix rho = random_density(16, seed);
    const CMatrix drho = apply_rhs(m, rho);
    EXPECT_NEAR((drho - dense_lindblad(h, jumps, m.rates, rho)).cwiseAbs().maxCoeff(), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(drho.trace()), 0.0, 1e-13);
    EXPECT_NEAR((drho - drho.adjoint()).cwiseAbs().maxCoeff(), 0.0, 1e-14);
  }
}

TEST(FullModel, PulseSwitchesDriveOff) {
  DriveField d;
  d.rabi = 0.1;
  d.detuning = -3.0;
  d.pulse = {PulseShape::kOffInRegimeI, 5.0};
  const AtomArray sys(LevelScheme::two_level(), build_lattice(1, 1, 0.1), d);
  const LindbladModel m = build_full_model(sys);
  EXPECT_EQ(m.breakpoints, std::vector<Real>{5.0});
  const CMatrix ground = product_density(sys.space(), default_local_state(sys.scheme));
  EXPECT_GT(apply_rhs(m, ground, 4.0).cwiseAbs().maxCoeff(), 0.01);
  EXPECT_EQ(apply_rhs(m, ground, 6.0).cwiseAbs().maxCoeff(), 0.0);
}

TEST(FullModel, TruncationWithFullCapIsExact) {
  DriveField d;
  d.rabi = 0.1;
  d.detuning = -3.0;
  const AtomArray sys(LevelScheme::four_level(), build_lattice(1, 3, 0.1), d);
  const TruncatedModel full = build_truncated_model(sys, 3);
  EXPECT_EQ(full.sector.size(), full.space.dim());
  const TruncatedModel one = build_truncated_model(sys, 1);
  // 8 ground + 3 * 2 * 4 single-excitation states
  EXPECT_EQ(one.sector.size(), 8 + 24);
  const CMatrix rho = one.restrict(product_density(sys.space(), default_local_state(sys.scheme)));
  EXPECT_NEAR(std::abs(apply_rhs(one.model, rho).trace()), 0.0, 1e-14);
  EXPECT_THROW(build_truncated_model(sys, 0), InvalidInput);
}

TEST(FullModel, ExcitedPopulationStaysSmallUnderWeakDrive) {
  DriveField d;
  d.rabi = 0.1;
  d.detuning = -3.0;
  const AtomArray sys(LevelScheme::four_level(), build_lattice(1, 3, 0.1), d);
  const LindbladModel m = build_full_model(sys);
  Real peak = 0.0;
  std::vector<Real> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(10.0 * i);
  const auto rep = propagate(m, product_density(sys.space(), default_local_state(sys.scheme)), grid,
                             [&](Real, const CMatrix& r) { peak = std::max(peak, excited_population(sys.space(), sys.scheme, r)); });
  EXPECT_LT(peak, 3 * 0.01);
  EXPECT_GT(peak, 1e-4);
  EXPECT_LT(rep.max_trace_error, 1e-10);
  EXPECT_FALSE(rep.positivity_warning);
}

// Brute-force count of states with exactly one excited atom.
TEST(EffectiveModel, SingleExcitationBlockDimension) {
  DriveField d;
  d.rabi = 0.1;
  d.detuning = -3.0;
  for (int n : {1, 2, 5}) {
    const AtomArray sys(LevelScheme::four_level(), build_lattice(1, n, 0.1), d);
    const ProductSpace sp = sys.space();
    std::int64_t count = 0;
    for (std::int64_t s = 0; s < sp.dim(); ++s) {
      int exc = 0;
      for (int i = 0; i < n; ++i) exc += sp.digit(s, i) >= 2 ? 1 : 0;
      count += exc == 1 ? 1 : 0;
    }
    const ExcitationSectors sec(sys);
    EXPECT_EQ(sec.single.size(), count);
    EXPECT_EQ(build_h_nh(sys, sec).rows(), count);
  }
  const AtomArray two(LevelScheme::four_level(), build_lattice(1, 2, 0.1), d);
  EXPECT_EQ(ExcitationSectors(two).single.size(), 8);
  const AtomArray five(LevelScheme::four_level(), build_lattice(1, 5, 0.1), d);
  EXPECT_EQ(ExcitationSectors(five).single.size(), 160);
}

TEST(EffectiveModel, SingleAtomNonHermitianBlock) {
  DriveField d;
  d.rabi = 0.1;
  d.detuning = -3.0;
  const AtomArray sys(LevelScheme::four_level(), build_lattice(1, 1, 0.1), d);
  const CMatrix h = build_h_nh(sys, ExcitationSectors(sys));
  EXPECT_NEAR((h - Complex(3.0, -0.5) * CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

}  // namespace
}  // namespace dipolar
