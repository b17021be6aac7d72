#include "tlqg/common.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace tlqg {

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a, two_pi);
  if (w > std::numbers::pi) {
    w -= two_pi;
  } else if (w <= -std::numbers::pi) {
    w += two_pi;
  }
  return w;
}

Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(m));
  Vector lambda = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
}

Matrix invert_innovation(const Matrix& s) {
  const Matrix sym = symmetrized(s);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  Vector lambda = eig.eigenvalues();
  const double lo = lambda.minCoeff();
  const double hi = lambda.maxCoeff();
  const bool ill = lo <= 0.0 || (hi > 0.0 && hi / lo > 1e12);
  if (ill) {
    lambda.array() += 1e-12;
  }
  if (lambda.minCoeff() <= 0.0 || !lambda.allFinite()) {
    std::ostringstream msg;
    msg << "innovation covariance singular beyond regularization floor"
        << " (min eigenvalue " << lo << ", max " << hi << ")";
    throw NumericalError(msg.str());
  }
  return eig.eigenvectors() * lambda.cwiseInverse().asDiagonal() *
         eig.eigenvectors().transpose();
}

double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(m));
  return eig.eigenvalues().minCoeff();
}

bool is_finite(const Vector& v) { return v.allFinite(); }
bool is_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace tlqg
