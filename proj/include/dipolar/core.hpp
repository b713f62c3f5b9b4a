#pragma once

// Shared scalar/vector types, unit conventions and error types.
//
// Units throughout the library: Gamma = 1 (single-atom linewidth), hbar = 1,
// lengths in units of the transition wavelength lambda, so k0 = 2*pi.

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dipolar {

using Real = double;
using Complex = std::complex<double>;

inline constexpr Real kPi = std::numbers::pi;
inline constexpr Real kTwoPi = 2.0 * std::numbers::pi;
/// Free-space wavenumber in units of 1/lambda.
inline constexpr Real kK0 = kTwoPi;
inline constexpr Complex kI{0.0, 1.0};

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;
using CMat3 = Eigen::Matrix3cd;

using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
/// Row-major dense complex matrix (propagation state layout).
using RowCMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SpMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or inconsistent model input.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Numerical failure (singular matrices, step-size underflow, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Configuration / schema error. Carries every problem found, one per line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dipolar
