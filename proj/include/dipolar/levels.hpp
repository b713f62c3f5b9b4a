#pragma once

// Atomic level schemes: ground/excited Zeeman manifolds and the
// Clebsch-Gordan weights C_n^q = <F_g, n; 1, q | F_e, n + q>.
//
// Angular momenta are stored doubled (2F, 2m) so half-integers stay exact.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "dipolar/core.hpp"

namespace dipolar {

namespace detail {

inline Real log_factorial(int n) { return std::lgamma(static_cast<Real>(n) + 1.0); }

inline bool is_integer_half(int twice) { return twice % 2 == 0; }

}  // namespace detail

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M> with all arguments doubled.
/// Condon-Shortley phase convention (Racah closed form).
inline Real clebsch_gordan(int j1, int m1, int j2, int m2, int J, int M) {
  if (m1 + m2 != M) return 0.0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(M) > J) return 0.0;
  if (J < std::abs(j1 - j2) || J > j1 + j2) return 0.0;
  if ((j1 + j2 + J) % 2 != 0) return 0.0;
  if ((j1 + m1) % 2 != 0 || (j2 + m2) % 2 != 0 || (J + M) % 2 != 0) return 0.0;

  using detail::log_factorial;
  // Halve everything; all combinations below are integers.
  const int a = (j1 + j2 - J) / 2;
  const int b = (j1 - j2 + J) / 2;
  const int c = (-j1 + j2 + J) / 2;
  const int d = (j1 + j2 + J) / 2 + 1;
  const Real log_pre = 0.5 * (std::log(J + 1.0) + log_factorial(a) + log_factorial(b) +
                              log_factorial(c) - log_factorial(d) +
                              log_factorial((j1 + m1) / 2) + log_factorial((j1 - m1) / 2) +
                              log_factorial((j2 + m2) / 2) + log_factorial((j2 - m2) / 2) +
                              log_factorial((J + M) / 2) + log_factorial((J - M) / 2));

  const int k_min = std::max({0, (j2 - J - m1) / 2, (j1 - J + m2) / 2});
  const int k_max = std::min({a, (j1 - m1) / 2, (j2 + m2) / 2});
  Real sum = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    const Real term = std::exp(-(log_factorial(k) + log_factorial(a - k) +
                                 log_factorial((j1 - m1) / 2 - k) + log_factorial((j2 + m2) / 2 - k) +
                                 log_factorial((J - j2 + m1) / 2 + k) +
                                 log_factorial((J - j1 - m2) / 2 + k)));
    sum += (k % 2 == 0) ? term : -term;
  }
  return std::exp(log_pre) * sum;
}

/// A (possibly truncated) F_g -> F_e dipole transition.
///
/// Local single-atom basis: included ground sublevels (ascending m) first,
/// then included excited sublevels (ascending m).
class LevelScheme {
 public:
  LevelScheme() = default;

  /// Full manifolds for the doubled angular momenta. F_g = F_e = 0 is the
  /// two-level convention: a single pi transition with C = 1.
  static LevelScheme from_angular_momenta(int twice_fg, int twice_fe) {
    if (twice_fg < 0 || twice_fe < 0) throw InvalidInput("angular momenta must be >= 0");
    if ((twice_fe - twice_fg) % 2 != 0) throw InvalidInput("F_e - F_g must be an integer");
    if (std::abs(twice_fe - twice_fg) > 2) {
      throw InvalidInput("dipole-forbidden level pair: |F_g - F_e| > 1");
    }
    LevelScheme s;
    s.twice_fg_ = twice_fg;
    s.twice_fe_ = twice_fe;
    s.two_level_ = (twice_fg == 0 && twice_fe == 0);
    s.ground_m_.clear();
    s.excited_m_.clear();
    for (int m = -twice_fg; m <= twice_fg; m += 2) s.ground_m_.push_back(m);
    for (int m = -twice_fe; m <= twice_fe; m += 2) s.excited_m_.push_back(m);
    return s;
  }

  static LevelScheme two_level() { return from_angular_momenta(0, 0); }
  static LevelScheme four_level() { return from_angular_momenta(1, 1); }

  /// 3P2 -> 3D3 restricted to m_J in {1, 2} (ground) and {2, 3} (excited).
  static LevelScheme sr88_four_level() {
    return from_angular_momenta(4, 6).restricted({2, 4}, {4, 6});
  }

  /// Keeps only the listed doubled m values of each manifold.
  [[nodiscard]] LevelScheme restricted(std::vector<int> ground_m, std::vector<int> excited_m) const {
    auto check = [](const std::vector<int>& subset, const std::vector<int>& full, const char* which) {
      if (subset.empty()) throw InvalidInput(std::string("empty ") + which + " sublevel set");
      for (int m : subset) {
        if (std::find(full.begin(), full.end(), m) == full.end()) {
          throw InvalidInput(std::string("sublevel not in ") + which + " manifold");
        }
      }
    };
    check(ground_m, ground_m_, "ground");
    check(excited_m, excited_m_, "excited");
    LevelScheme s = *this;
    std::sort(ground_m.begin(), ground_m.end());
    std::sort(excited_m.begin(), excited_m.end());
    s.ground_m_ = std::move(ground_m);
    s.excited_m_ = std::move(excited_m);
    return s;
  }

  [[nodiscard]] int twice_fg() const { return twice_fg_; }
  [[nodiscard]] int twice_fe() const { return twice_fe_; }
  [[nodiscard]] bool is_two_level() const { return two_level_; }
  [[nodiscard]] int n_ground() const { return static_cast<int>(ground_m_.size()); }
  [[nodiscard]] int n_excited() const { return static_cast<int>(excited_m_.size()); }
  [[nodiscard]] int local_dim() const { return n_ground() + n_excited(); }
  [[nodiscard]] const std::vector<int>& ground_m() const { return ground_m_; }
  [[nodiscard]] const std::vector<int>& excited_m() const { return excited_m_; }
  [[nodiscard]] bool is_excited(int local_state) const { return local_state >= n_ground(); }

  /// C_n^q for ground sublevel of doubled projection m2 and polarization q.
  [[nodiscard]] Real cg(int m2, int q) const {
    if (two_level_) return (q == 0 && m2 == 0) ? 1.0 : 0.0;
    return clebsch_gordan(twice_fg_, m2, 2, 2 * q, twice_fe_, m2 + 2 * q);
  }

  /// Local raising operator D^+_q = sum_n C_n^q |e_{n+q}><g_n| restricted to
  /// the included sublevels (local_dim x local_dim).
  [[nodiscard]] RMatrix raising(int q) const {
    RMatrix op = RMatrix::Zero(local_dim(), local_dim());
    for (int g = 0; g < n_ground(); ++g) {
      const int target = ground_m_[static_cast<std::size_t>(g)] + 2 * q;
      for (int e = 0; e < n_excited(); ++e) {
        if (excited_m_[static_cast<std::size_t>(e)] == target) {
          op(n_ground() + e, g) = cg(ground_m_[static_cast<std::size_t>(g)], q);
        }
      }
    }
    return op;
  }

  /// Polarizations with at least one nonzero transition in the included set.
  [[nodiscard]] std::vector<int> active_polarizations() const {
    std::vector<int> qs;
    for (int q = -1; q <= 1; ++q) {
      if (raising(q).cwiseAbs().maxCoeff() > 0.0) qs.push_back(q);
    }
    return qs;
  }

  /// Projector onto the excited sublevels of one atom.
  [[nodiscard]] RMatrix excited_projector() const {
    RMatrix p = RMatrix::Zero(local_dim(), local_dim());
    for (int e = 0; e < n_excited(); ++e) p(n_ground() + e, n_ground() + e) = 1.0;
    return p;
  }

 private:
  int twice_fg_ = 0;
  int twice_fe_ = 0;
  bool two_level_ = true;
  std::vector<int> ground_m_{0};
  std::vector<int> excited_m_{0};
};

/// Full CG table for a transition (the level-scheme constructor under its
/// operational name).
inline LevelScheme cg_table(int twice_fg, int twice_fe) {
  return LevelScheme::from_angular_momenta(twice_fg, twice_fe);
}

}  // namespace dipolar
