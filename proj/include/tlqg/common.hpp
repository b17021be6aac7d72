#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace tlqg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A scenario, model or solver input is unusable as given.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A model was evaluated at a singular point (zero range, barrier sample, ...).
class EvaluationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Linear algebra failed beyond the regularization floor.
class NumericalError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

// Symmetric square root of a PSD matrix; eigenvalues below zero are clamped.
Matrix psd_sqrt(const Matrix& m);

// Inverse of a symmetric innovation-type matrix. Adds 1e-12*I when the
// condition number exceeds 1e12; throws NumericalError (with a condition
// report) if the matrix stays singular past that floor.
Matrix invert_innovation(const Matrix& s);

double min_eigenvalue(const Matrix& m);

bool is_finite(const Vector& v);
bool is_finite(const Matrix& m);

}  // namespace tlqg
