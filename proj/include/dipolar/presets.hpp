#pragma once

// Frozen experiment presets. Each preset is a YAML sequence of complete runs.
// Changing a preset changes published outputs; add a new one instead.

#include <map>
#include <string>

namespace dipolar {

inline const std::map<std::string, std::string>& preset_texts() {
  static const std::map<std::string, std::string> presets{
      // N = 5 chain, Omega = 0.1, Delta = -3, r = 0.1: two-level vs four-level ED,
      // plus the two drive switch-off protocols.
      {"fig2", R"(
- name: fig2_two_level
  solver: ed
  levels: two_level
  geometry: {dim: 1, n: 5, spacing: 0.1}
  drive: {rabi: 0.1, detuning: -3.0}
  time: {t_end: 1000, steps: 201}
  observables: [excited, negativity]
- name: fig2_four_level
  solver: ed
  levels: four_level
  geometry: {dim: 1, n: 5, spacing: 0.1}
  drive: {rabi: 0.1, detuning: -3.0}
  time: {t_end: 1000, steps: 201}
  observables: [excited, negativity]
  ed: {max_excitations: 2}
- name: fig2_four_level_off_regime_i
  solver: ed
  levels: four_level
  geometry: {dim: 1, n: 5, spacing: 0.1}
  drive: {rabi: 0.1, detuning: -3.0, pulse: off_in_regime_i, t_off: 5}
  time: {t_end: 40, steps: 81}
  observables: [excited, negativity]
  ed: {max_excitations: 2}
- name: fig2_four_level_off_regime_ii
  solver: ed
  levels: four_level
  geometry: {dim: 1, n: 5, spacing: 0.1}
  drive: {rabi: 0.1, detuning: -3.0, pulse: off_in_regime_ii, t_off: 500}
  time: {t_end: 1000, steps: 201}
  observables: [excited, negativity]
  ed: {max_excitations: 2}
)"},
      // Ground-manifold negativity of an N = 2 pair over a detuning grid.
      {"fig1d", R"(
- name: fig1d
  solver: gsm
  levels: four_level
  geometry: {dim: 1, n: 2, spacing: 0.1}
  drive: {rabi: 0.1, detuning: -3.0}
  time: {t_end: 10000, steps: 201}
  observables: [negativity]
  scan: {parameter: detuning, from: -10, to: 10, count: 41}
)"},
      // 10 x 10 periodic array, e_L = Z: DTWA and linear spin waves.
      {"fig3", R"(
- name: fig3_dtwa
  solver: dtwa
  geometry: {dim: 2, n: 10, spacing: 0.1, periodic: true}
  drive: {rabi: 1.0, detuning: 10.0}
  time: {t_end: 0.5, steps: 26, in_tau: true}
  observables: [nk, p2, squeezing, sx]
  dtwa: {n_traj: 10000}
  seed: 20240601
- name: fig3_swa
  solver: swa
  geometry: {dim: 2, n: 10, spacing: 0.1, periodic: true}
  drive: {rabi: 1.0, detuning: 10.0}
  time: {t_end: 0.5, steps: 26, in_tau: true}
  observables: [nk, p2, squeezing, xi2]
)"},
      // Two 88Sr atoms at r = lambda_L / 2 = 0.067 lambda.
      {"sr88", R"(
- name: sr88
  solver: gsm
  levels: sr88
  geometry: {dim: 1, n: 2, spacing: 0.067}
  drive: {rabi: 0.1, detuning: 27.0}
  time: {t_end: 100000, steps: 401}
  observables: [negativity, toth]
)"},
      // N = 2 four-level pair: ground-manifold model against the full model.
      {"figS1", R"(
- name: figS1_gsm
  solver: gsm
  levels: four_level
  geometry: {dim: 1, n: 2, spacing: 0.1}
  drive: {rabi: 0.1, detuning: -3.0}
  time: {t_end: 2000, steps: 401}
  observables: [population, negativity]
- name: figS1_ed
  solver: ed
  levels: four_level
  geometry: {dim: 1, n: 2, spacing: 0.1}
  drive: {rabi: 0.1, detuning: -3.0}
  time: {t_end: 2000, steps: 401}
  observables: [population, excited, negativity]
)"},
  };
  return presets;
}

}  // namespace dipolar
