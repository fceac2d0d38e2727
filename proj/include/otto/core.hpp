#pragma once

// Shared numeric types and the error hierarchy used across the library.

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace otto {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

/// Largest chain handled by the dense exact-diagonalization path.
inline constexpr int kMaxSites = 12;

/// Bad input: malformed parameters, configs, or preconditions a caller can fix.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (non-convergence, broken invariant).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Elementwise max |M - M^dagger|.
double hermiticity_defect(const Matrix& m);

}  // namespace otto
