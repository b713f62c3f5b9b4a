// Two four-level atoms at r = 0.1: ground-manifold entanglement under the
// Hamiltonian part of the effective model, next to the closed-form Renyi entropy.
#include <cstdio>

#include "dipolar/effective.hpp"
#include "dipolar/observables.hpp"
#include "dipolar/xy_model.hpp"

int main() {
  using namespace dipolar;
  DriveField d;
  d.rabi = 0.1;
  d.detuning = -3.0;
  const AtomArray sys(LevelScheme::four_level(), build_lattice(1, 2, 0.1), d);
  const EffectiveModel em = effective_operators(sys);
  const PauliDecomposition p = pauli_decompose_n2(em.h_eff);
  std::printf("lambda1 = %.6e  lambda2 = %.6e\n", p.lambda1(), p.lambda2());
  std::printf("%10s %12s %12s %12s\n", "t", "E_N", "S2", "S2_closed");
  std::vector<Real> ts;
  for (int i = 0; i <= 20; ++i) ts.push_back(250.0 * i);
  propagate(em.lindblad(true, false), ground_product_density(em, default_ground_state(sys.scheme)), ts,
            [&](Real t, const CMatrix& rho) {
              std::printf("%10.1f %12.6f %12.6f %12.6f\n", t, log_negativity(em.ground_space, rho, {{0}}),
                          renyi2(em.ground_space, rho, {{0}}), renyi_closed_form(p.lambda1(), p.lambda2(), t));
            });
}
