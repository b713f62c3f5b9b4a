// 10 x 10 periodic array: spin-wave spectrum and a short DTWA run for the
// most squeezed mode.
#include <cstdio>

#include "dipolar/dtwa.hpp"
#include "dipolar/spinwave.hpp"

int main() {
  using namespace dipolar;
  DriveField d;
  d.rabi = 1.0;
  d.detuning = 10.0;
  const PeriodicGrid g{10, 10, 0.1};
  const XYModel m = periodic_xy_model(g, d);
  const SpinWaveSpectrum s(m, g);
  const SpinWaveMode* best = nullptr;
  for (const auto& md : s.modes())
    if (md.squeezable && (!best || md.xi2 < best->xi2)) best = &md;
  if (!best) return 1;
  const Real tau = tau_unit(d.rabi, d.detuning);
  std::printf("most squeezed mode (%d,%d): xi^2 = %.4f, tau = %.2f\n", best->nx, best->nz, best->xi2, tau);

  std::vector<Real> ts;
  for (int i = 0; i <= 5; ++i) ts.push_back(0.1 * tau * i);
  DtwaOptions opt;
  opt.n_traj = 2000;
  opt.seed = 7;
  const DtwaResult r = run_dtwa(m, g.geometry(), {best->k}, ts, opt);
  std::printf("%8s %12s %12s %12s %12s\n", "t/tau", "n_k", "n_k(SWA)", "P^2", "P^2(SWA)");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const auto& e = r.estimates[i][0];
    std::printf("%8.2f %12.4e %12.4e %12.4f %12.4f\n", ts[i] / tau, e.n_k, mode_occupation(*best, ts[i]), e.p2,
                variance_p(*best, ts[i]));
  }
}
