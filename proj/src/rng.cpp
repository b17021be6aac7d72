#include "tlqg/rng.hpp"

#include <cmath>
#include <numbers>

namespace tlqg {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::next_u64() {
  state_ += 0x9E3779B97F4A7C15ull;
  return mix64(state_);
}

double CounterRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  // u1 in (0, 1] keeps the log finite.
  const double u1 =
      (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

Vector CounterRng::normal_vector(int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = normal();
  }
  return v;
}

std::uint64_t CounterRng::derive(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed + 0x9E3779B97F4A7C15ull * (stream + 1));
}

Vector sample_gaussian(const Vector& mean, const Matrix& cov, CounterRng& rng) {
  if (cov.size() == 0 || cov.isZero(0.0)) {
    return mean;
  }
  Eigen::LLT<Matrix> llt(symmetrized(cov));
  Matrix root;
  if (llt.info() == Eigen::Success) {
    root = llt.matrixL();
  } else {
    root = psd_sqrt(cov);
  }
  return mean + root * rng.normal_vector(static_cast<int>(mean.size()));
}

}  // namespace tlqg
