#pragma once

// Adiabatic elimination of the excited manifold (effective-operator
// formalism): H_eff and effective jumps on the ground-state manifold.

#include <sstream>
#include <vector>

#include <Eigen/LU>

#include "dipolar/core.hpp"
#include "dipolar/full_model.hpp"
#include "dipolar/hilbert.hpp"
#include "dipolar/lindblad.hpp"

namespace dipolar {

/// Ground manifold (all atoms in ground sublevels) and single-excitation
/// sector (exactly one atom excited) inside the full product space.
struct ExcitationSectors {
  ProductSpace space;
  Sector ground;
  Sector single;

  explicit ExcitationSectors(const AtomArray& sys) : space(sys.space()) {
    const int ng = sys.scheme.n_ground();
    auto n_excited = [this, ng](std::int64_t s) {
      int n = 0;
      for (int i = 0; i < space.n_sites(); ++i) n += space.digit(s, i) >= ng ? 1 : 0;
      return n;
    };
    ground = Sector(space, [&](std::int64_t s) { return n_excited(s) == 0; });
    single = Sector(space, [&](std::int64_t s) { return n_excited(s) == 1; });
  }
};

/// H_NH = -Delta sum P_e - sum_{ij,qq'} (Delta^{ij}_{qq'} + i Gamma^{ij}_{qq'}) D^{i+}_q D^{j-}_{q'}
/// restricted to the single-excitation sector (dense).
inline CMatrix build_h_nh(const AtomArray& sys, const ExcitationSectors& sec) {
  const DriveHamiltonian h0 = build_drive_hamiltonian(sys);
  const DipolarTerms dd = build_dipolar_terms(sys);
  SpMatrix decay(sec.space.dim(), sec.space.dim());
  const auto& jumps = dd.jumps;
  for (std::size_t a = 0; a < jumps.size(); ++a) {
    const SpMatrix la_dag = jumps[a].adjoint();
    for (std::size_t b = 0; b < jumps.size(); ++b) {
      const Complex g = dd.rates(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      if (g == Complex(0.0)) continue;
      decay += g * SpMatrix(la_dag * jumps[b]);
    }
  }
  const SpMatrix full = h0.detuning + dd.hamiltonian - kI * decay;
  return CMatrix(restrict_operator(full, sec.single, sec.single));
}

/// Effective model on the ground manifold. Jump operators are ordered as
/// (atom, q) over the active polarizations, matching `rates`.
struct EffectiveModel {
  CMatrix h_eff;
  std::vector<CMatrix> jumps;
  CMatrix rates;
  std::vector<int> polarizations;
  ProductSpace ground_space;  ///< n_ground-level sites, same atom order
  Real reciprocal_condition = 0.0;
  Pulse pulse{};

  /// Master equation; the drive envelope enters squared in every term.
  [[nodiscard]] LindbladModel lindblad(bool with_hamiltonian = true, bool with_dissipation = true) const {
    LindbladModel m;
    const auto dim = h_eff.rows();
    m.h_static = SpMatrix(dim, dim);
    m.h_drive = with_hamiltonian ? SpMatrix(h_eff.sparseView(1e-300, 1.0)) : SpMatrix(dim, dim);
    if (with_dissipation) {
      for (const auto& l : jumps) m.jumps.emplace_back(l.sparseView(1e-300, 1.0));
      m.rates = rates;
    }
    const Pulse p = pulse;
    m.drive_scale = [p](Real t) { return p(t) * p(t); };
    m.dissipator_scale = m.drive_scale;
    m.breakpoints = p.breakpoints();
    return m;
  }
};

/// Largest acceptable 1/rcond of H_NH before the inversion is refused.
inline constexpr Real kMaxConditionNumber = 1e12;

inline EffectiveModel effective_operators(const AtomArray& sys) {
  const ExcitationSectors sec(sys);
  const CMatrix h_nh = build_h_nh(sys, sec);
  const DriveHamiltonian h0 = build_drive_hamiltonian(sys);
  const CMatrix v_plus = CMatrix(restrict_operator(h0.raising, sec.single, sec.ground));

  Eigen::PartialPivLU<CMatrix> lu(h_nh);
  const Real rcond = lu.rcond();
  if (!(rcond * kMaxConditionNumber > 1.0)) {
    // Name the single-excitation configuration with the largest weight in the
    // nearly-null direction.
    Eigen::ComplexEigenSolver<CMatrix> es(h_nh);
    Eigen::Index k = 0;
    es.eigenvalues().cwiseAbs().minCoeff(&k);
    Eigen::Index idx = 0;
    es.eigenvectors().col(k).cwiseAbs().maxCoeff(&idx);
    const std::int64_t state = sec.single.states()[static_cast<std::size_t>(idx)];
    std::ostringstream msg;
    msg << "H_NH is near-singular (condition number " << 1.0 / rcond << "); resonant configuration:";
    for (int i = 0; i < sec.space.n_sites(); ++i) msg << ' ' << sec.space.digit(state, i);
    throw NumericalError(msg.str());
  }
  const CMatrix x = lu.solve(v_plus);

  EffectiveModel em;
  em.reciprocal_condition = rcond;
  em.h_eff = -0.5 * (v_plus.adjoint() * x + x.adjoint() * v_plus);
  em.h_eff = 0.5 * (em.h_eff + em.h_eff.adjoint()).eval();
  em.polarizations = sys.polarizations();
  em.ground_space = ProductSpace(sys.n_atoms(), sys.scheme.n_ground());
  em.pulse = sys.drive.pulse;

  const auto up = local_raising(sys.scheme);
  for (int i = 0; i < sys.n_atoms(); ++i) {
    for (int q : em.polarizations) {
      const CMatrix down = up[static_cast<std::size_t>(q + 1)].adjoint();
      const SpMatrix d_full = site_operator(sec.space, i, down);
      const CMatrix d = CMatrix(restrict_operator(d_full, sec.ground, sec.single));
      em.jumps.push_back(d * x);
    }
  }
  em.rates = sys.couplings.gamma_matrix(em.polarizations);
  return em;
}

/// Embeds a ground-manifold density matrix into the full product space.
inline CMatrix embed_ground_state(const AtomArray& sys, const CMatrix& rho_ground) {
  const ExcitationSectors sec(sys);
  CMatrix rho = CMatrix::Zero(sec.space.dim(), sec.space.dim());
  const auto& st = sec.ground.states();
  for (std::size_t a = 0; a < st.size(); ++a) {
    for (std::size_t b = 0; b < st.size(); ++b) {
      rho(static_cast<Eigen::Index>(st[a]), static_cast<Eigen::Index>(st[b])) =
          rho_ground(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }
  return rho;
}

/// Ground-manifold product state with identical local ground amplitudes.
inline CMatrix ground_product_density(const EffectiveModel& em, const CVector& local_ground) {
  return product_density(em.ground_space, local_ground);
}

/// Local ground amplitudes of default_local_state (ground components only).
inline CVector default_ground_state(const LevelScheme& scheme) {
  return default_local_state(scheme).head(scheme.n_ground());
}

}  // namespace dipolar
