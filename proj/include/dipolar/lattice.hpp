#pragma once

// Array geometries, the spherical polarization basis, drive fields and
// pulse envelopes.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dipolar/core.hpp"

namespace dipolar {

/// Point-like atoms pinned at fixed positions (units of lambda).
///
/// Generated lattices are a 1D chain along X (site i at i*a) or a 2D square
/// array in the X-Z plane (site i at (i mod L, i / L) * a).
struct ArrayGeometry {
  std::vector<Vec3> positions;
  Real lattice_constant = 0.0;
  int dimensionality = 0;  ///< 1 or 2 for generated lattices, 0 for arbitrary
  int n_per_side = 0;

  [[nodiscard]] std::size_t size() const { return positions.size(); }

  /// Displacement r_i - r_j.
  [[nodiscard]] Vec3 displacement(std::size_t i, std::size_t j) const {
    return positions[i] - positions[j];
  }

  /// Integer lattice coordinates (x, z) of a site; only for generated lattices.
  [[nodiscard]] std::array<int, 2> cell(std::size_t i) const {
    if (dimensionality == 1) return {static_cast<int>(i), 0};
    const auto l = static_cast<std::size_t>(n_per_side);
    return {static_cast<int>(i % l), static_cast<int>(i / l)};
  }
};

/// Throws if two atoms coincide.
inline void validate_geometry(const ArrayGeometry& geom) {
  if (geom.positions.empty()) throw InvalidInput("geometry has no atoms");
  for (std::size_t i = 0; i < geom.size(); ++i) {
    for (std::size_t j = i + 1; j < geom.size(); ++j) {
      if (geom.displacement(i, j).norm() <= 0.0) {
        throw InvalidInput("atoms " + std::to_string(i) + " and " + std::to_string(j) +
                           " coincide");
      }
    }
  }
}

inline ArrayGeometry build_lattice(int dim, int n_per_side, Real a) {
  if (dim != 1 && dim != 2) throw InvalidInput("lattice dimensionality must be 1 or 2");
  if (n_per_side < 1) throw InvalidInput("n_per_side must be >= 1");
  if (!(a > 0.0) || !std::isfinite(a)) throw InvalidInput("lattice constant must be > 0");

  ArrayGeometry geom;
  geom.lattice_constant = a;
  geom.dimensionality = dim;
  geom.n_per_side = n_per_side;
  const int n = dim == 1 ? n_per_side : n_per_side * n_per_side;
  geom.positions.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (dim == 1) {
      geom.positions.emplace_back(i * a, 0.0, 0.0);
    } else {
      geom.positions.emplace_back((i % n_per_side) * a, 0.0, (i / n_per_side) * a);
    }
  }
  return geom;
}

inline ArrayGeometry geometry_from_positions(std::vector<Vec3> positions) {
  ArrayGeometry geom;
  geom.positions = std::move(positions);
  validate_geometry(geom);
  return geom;
}

/// Spherical basis e_0, e_{+1}, e_{-1}, optionally tilted by theta about Y.
///
/// theta = 0 gives e_0 = Z and e_{+-1} = -+(X +- iY)/sqrt(2).
class PolarizationBasis {
 public:
  explicit PolarizationBasis(Real theta = 0.0) : theta_(theta) {
    const Vec3 x_axis(std::cos(theta), 0.0, -std::sin(theta));
    const Vec3 y_axis(0.0, 1.0, 0.0);
    const Vec3 z_axis(std::sin(theta), 0.0, std::cos(theta));
    const Real s = 1.0 / std::sqrt(2.0);
    vectors_[1] = z_axis.cast<Complex>();
    vectors_[2] = -s * (x_axis.cast<Complex>() + kI * y_axis.cast<Complex>());
    vectors_[0] = s * (x_axis.cast<Complex>() - kI * y_axis.cast<Complex>());
  }

  /// Basis vector for q in {-1, 0, +1}.
  [[nodiscard]] const CVec3& operator[](int q) const { return vectors_.at(static_cast<std::size_t>(q + 1)); }
  [[nodiscard]] Real theta() const { return theta_; }

 private:
  Real theta_;
  std::array<CVec3, 3> vectors_;
};

enum class PulseShape : int { kAlwaysOn = 1, kOffInRegimeI = 2, kOffInRegimeII = 3 };

/// Square drive envelope: 1 before the switch-off time, 0 after.
/// Shapes 2 and 3 only differ by where t_off sits in the dynamics.
inline Real pulse_envelope(PulseShape shape, Real t_off, Real t) {
  if (shape == PulseShape::kAlwaysOn) return 1.0;
  return t < t_off ? 1.0 : 0.0;
}

struct Pulse {
  PulseShape shape = PulseShape::kAlwaysOn;
  Real t_off = 0.0;

  [[nodiscard]] Real operator()(Real t) const { return pulse_envelope(shape, t_off, t); }

  /// Times at which the envelope jumps; integrators must not step across them.
  [[nodiscard]] std::vector<Real> breakpoints() const {
    if (shape == PulseShape::kAlwaysOn) return {};
    return {t_off};
  }

  void validate() const {
    if (shape != PulseShape::kAlwaysOn && !(t_off > 0.0)) {
      throw InvalidInput("pulse shapes 2 and 3 need t_off > 0");
    }
  }
};

/// Coherent laser drive. Frequencies in units of Gamma.
struct DriveField {
  Real rabi = 0.0;
  Real detuning = 0.0;
  Vec3 k_hat = Vec3(0.0, 1.0, 0.0);
  CVec3 polarization = CVec3(0.0, 0.0, 1.0);
  Pulse pulse{};

  void validate() const {
    if (!(rabi >= 0.0) || !std::isfinite(rabi)) throw InvalidInput("Rabi frequency must be >= 0");
    if (!std::isfinite(detuning)) throw InvalidInput("detuning must be finite");
    if (std::abs(polarization.squaredNorm() - 1.0) > 1e-12) {
      throw InvalidInput("drive polarization must be normalized");
    }
    if (std::abs(k_hat.norm() - 1.0) > 1e-12) throw InvalidInput("drive wavevector direction must be a unit vector");
    pulse.validate();
  }

  /// Complex Rabi coupling Omega (e_L . e_q^*) exp(i k.r) of atom at r to
  /// transitions of polarization q (without the envelope).
  [[nodiscard]] Complex coupling(const PolarizationBasis& basis, int q, const Vec3& r) const {
    // Plain bilinear product e_L . e_q^* (no conjugation of e_L).
    const Complex e_dot_eq_conj = (polarization.array() * basis[q].conjugate().array()).sum();
    return rabi * e_dot_eq_conj * std::exp(kI * kK0 * k_hat.dot(r));
  }
};

/// Polarization along the tilted e_0 direction sin(theta) X + cos(theta) Z.
inline CVec3 tilted_pi_polarization(Real theta) {
  return CVec3(std::sin(theta), 0.0, std::cos(theta));
}

}  // namespace dipolar
