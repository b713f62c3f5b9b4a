#pragma once

// Full multilevel driven-dissipative master equation on ((2F_g+1)+(2F_e+1))^N.

#include <algorithm>
#include <array>
#include <vector>

#include "dipolar/core.hpp"
#include "dipolar/green.hpp"
#include "dipolar/hilbert.hpp"
#include "dipolar/lattice.hpp"
#include "dipolar/levels.hpp"
#include "dipolar/lindblad.hpp"

namespace dipolar {

/// Everything needed to assemble the atom-light problem.
struct AtomArray {
  LevelScheme scheme;
  ArrayGeometry geometry;
  PolarizationBasis basis{};
  DriveField drive{};
  DipoleCouplings couplings{};

  AtomArray(LevelScheme s, ArrayGeometry g, DriveField d, PolarizationBasis b = PolarizationBasis{},
            bool near_field_only = false)
      : scheme(std::move(s)), geometry(std::move(g)), basis(b), drive(std::move(d)),
        couplings(geometry, basis, 1.0, near_field_only) {
    drive.validate();
  }

  [[nodiscard]] int n_atoms() const { return static_cast<int>(geometry.size()); }
  [[nodiscard]] ProductSpace space() const { return {n_atoms(), scheme.local_dim()}; }
  [[nodiscard]] std::vector<int> polarizations() const { return scheme.active_polarizations(); }

  /// Omega^i_q without the envelope.
  [[nodiscard]] Complex rabi(int atom, int q) const {
    return drive.coupling(basis, q, geometry.positions[static_cast<std::size_t>(atom)]);
  }
};

/// Local D^+_q as complex matrices, indexed by q + 1.
inline std::array<CMatrix, 3> local_raising(const LevelScheme& scheme) {
  std::array<CMatrix, 3> r;
  for (int q = -1; q <= 1; ++q) r[static_cast<std::size_t>(q + 1)] = scheme.raising(q).cast<Complex>();
  return r;
}

/// H_0 split into the detuning part and the drive part
/// -sum_{i,q} [Omega^i_q D^{i+}_q + h.c.].
struct DriveHamiltonian {
  SpMatrix detuning;  ///< -Delta sum_i P_e^i
  SpMatrix drive;     ///< envelope-scaled part
  SpMatrix raising;   ///< V_+ = -sum Omega^i_q D^{i+}_q
};

inline DriveHamiltonian build_drive_hamiltonian(const AtomArray& sys) {
  const ProductSpace space = sys.space();
  const auto up = local_raising(sys.scheme);
  const CMatrix pe = sys.scheme.excited_projector().cast<Complex>();
  std::vector<Eigen::Triplet<Complex>> det_trips;
  std::vector<Eigen::Triplet<Complex>> v_trips;
  for (int i = 0; i < space.n_sites(); ++i) {
    add_product(space, {{i, &pe}}, -sys.drive.detuning, det_trips);
    for (int q : sys.polarizations()) {
      add_product(space, {{i, &up[static_cast<std::size_t>(q + 1)]}}, -sys.rabi(i, q), v_trips);
    }
  }
  DriveHamiltonian h;
  h.detuning = from_triplets(space.dim(), space.dim(), det_trips);
  h.raising = from_triplets(space.dim(), space.dim(), v_trips);
  h.drive = h.raising + SpMatrix(h.raising.adjoint());
  return h;
}

/// Flip-flop Hamiltonian, jump operators and rate matrix of the dipolar
/// interaction. Jumps are D^{i-}_q ordered as (atom, q) with q over the
/// active polarizations.
struct DipolarTerms {
  SpMatrix hamiltonian;
  std::vector<SpMatrix> jumps;
  CMatrix rates;
};

inline DipolarTerms build_dipolar_terms(const AtomArray& sys) {
  const ProductSpace space = sys.space();
  const auto up = local_raising(sys.scheme);
  std::array<CMatrix, 3> down;
  for (std::size_t k = 0; k < 3; ++k) down[k] = up[k].adjoint();
  const std::vector<int> qs = sys.polarizations();

  std::vector<Eigen::Triplet<Complex>> trips;
  for (int i = 0; i < space.n_sites(); ++i) {
    for (int j = 0; j < space.n_sites(); ++j) {
      if (i == j) continue;
      for (int q : qs) {
        for (int qp : qs) {
          const Complex c = sys.couplings.delta(static_cast<std::size_t>(i), static_cast<std::size_t>(j), q, qp);
          add_product(space, {{i, &up[static_cast<std::size_t>(q + 1)]}, {j, &down[static_cast<std::size_t>(qp + 1)]}}, -c,
                      trips);
        }
      }
    }
  }
  DipolarTerms terms;
  terms.hamiltonian = from_triplets(space.dim(), space.dim(), trips);
  for (int j = 0; j < space.n_sites(); ++j) {
    for (int q : qs) terms.jumps.push_back(site_operator(space, j, down[static_cast<std::size_t>(q + 1)]));
  }
  terms.rates = sys.couplings.gamma_matrix(qs);
  return terms;
}

/// Complete ED master equation with the pulse envelope applied to the drive.
inline LindbladModel build_full_model(const AtomArray& sys) {
  const DriveHamiltonian h0 = build_drive_hamiltonian(sys);
  DipolarTerms dd = build_dipolar_terms(sys);
  LindbladModel m;
  m.h_static = h0.detuning + dd.hamiltonian;
  m.h_drive = h0.drive;
  m.jumps = std::move(dd.jumps);
  m.rates = std::move(dd.rates);
  const Pulse pulse = sys.drive.pulse;
  m.drive_scale = [pulse](Real t) { return pulse(t); };
  m.breakpoints = pulse.breakpoints();
  return m;
}

/// Number of excited atoms in a product-basis state.
inline int excitation_count(const ProductSpace& space, const LevelScheme& scheme, std::int64_t state) {
  int n = 0;
  for (int i = 0; i < space.n_sites(); ++i) n += scheme.is_excited(space.digit(state, i)) ? 1 : 0;
  return n;
}

/// Full model projected onto states with at most `max_excitations` excited
/// atoms. Jumps only lower the excitation number, so the projected generator
/// is still trace preserving; with max_excitations >= N it is the full model.
struct TruncatedModel {
  LindbladModel model;
  ProductSpace space;
  Sector sector;
  int max_excitations = 0;

  /// Full-space matrix from a sector matrix (zero outside the sector).
  [[nodiscard]] CMatrix embed(const CMatrix& rho) const {
    if (sector.size() == space.dim()) return rho;
    CMatrix full = CMatrix::Zero(space.dim(), space.dim());
    const auto& st = sector.states();
    for (std::size_t c = 0; c < st.size(); ++c) {
      for (std::size_t r = 0; r < st.size(); ++r) {
        full(st[r], st[c]) = rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
    }
    return full;
  }

  /// Sector block of a full-space matrix.
  [[nodiscard]] CMatrix restrict(const CMatrix& rho) const {
    if (sector.size() == space.dim()) return rho;
    const auto& st = sector.states();
    const auto n = static_cast<Eigen::Index>(st.size());
    CMatrix out(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      for (Eigen::Index r = 0; r < n; ++r) out(r, c) = rho(st[static_cast<std::size_t>(r)], st[static_cast<std::size_t>(c)]);
    }
    return out;
  }
};

inline TruncatedModel build_truncated_model(const AtomArray& sys, int max_excitations) {
  if (max_excitations < 1) throw InvalidInput("max_excitations must be >= 1");
  TruncatedModel t;
  t.space = sys.space();
  t.max_excitations = std::min(max_excitations, sys.n_atoms());
  const ProductSpace& space = t.space;
  const LevelScheme& scheme = sys.scheme;
  const int cap = t.max_excitations;
  t.sector = Sector(space, [&](std::int64_t s) { return excitation_count(space, scheme, s) <= cap; });
  LindbladModel full = build_full_model(sys);
  if (t.sector.size() == space.dim()) {
    t.model = std::move(full);
    return t;
  }
  t.model = full;
  t.model.h_static = restrict_operator(full.h_static, t.sector, t.sector);
  t.model.h_drive = restrict_operator(full.h_drive, t.sector, t.sector);
  for (auto& l : t.model.jumps) l = restrict_operator(l, t.sector, t.sector);
  return t;
}

/// Local ground-state vector: the default for two-level atoms is |g>, for
/// multilevel schemes the equal superposition of the two outermost included
/// ground sublevels, (|g_-> + |g_+>)/sqrt(2).
inline CVector default_local_state(const LevelScheme& scheme) {
  CVector v = CVector::Zero(scheme.local_dim());
  if (scheme.n_ground() == 1) {
    v(0) = 1.0;
  } else {
    v(0) = 1.0 / std::sqrt(2.0);
    v(scheme.n_ground() - 1) = 1.0 / std::sqrt(2.0);
  }
  return v;
}

inline CMatrix pure_density(const CVector& psi) { return psi * psi.adjoint(); }

/// rho = |psi><psi| for psi a product of identical local states.
inline CMatrix product_density(const ProductSpace& space, const CVector& local) {
  return pure_density(product_state(space, std::vector<CVector>(static_cast<std::size_t>(space.n_sites()), local)));
}

/// Projector onto one local level of one atom (diagonal, full space).
inline RVector level_population_weights(const ProductSpace& space, int atom, int level) {
  RVector w = RVector::Zero(space.dim());
  for (std::int64_t s = 0; s < space.dim(); ++s) {
    if (space.digit(s, atom) == level) w(static_cast<Eigen::Index>(s)) = 1.0;
  }
  return w;
}

/// <P_level^atom> for a density matrix on the product space.
inline Real level_population(const ProductSpace& space, const CMatrix& rho, int atom, int level) {
  Real p = 0.0;
  for (std::int64_t s = 0; s < space.dim(); ++s) {
    if (space.digit(s, atom) == level) p += rho(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)).real();
  }
  return p;
}

/// Total excited population sum_i <P_e^i>.
inline Real excited_population(const ProductSpace& space, const LevelScheme& scheme, const CMatrix& rho) {
  Real p = 0.0;
  for (std::int64_t s = 0; s < space.dim(); ++s) {
    p += excitation_count(space, scheme, s) * rho(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)).real();
  }
  return p;
}

}  // namespace dipolar
