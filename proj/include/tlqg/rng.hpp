#pragma once

#include <cstdint>

#include "tlqg/common.hpp"

namespace tlqg {

// Counter-based generator (splitmix64): the i-th draw is a hash of
// (seed, i), so streams are reproducible and cheap to fork per run.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform on [0, 1).
  double uniform();

  // Standard normal via Box-Muller; second value cached.
  double normal();

  Vector normal_vector(int n);

  // Deterministic sub-stream seed for (seed, stream) pairs.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::uint64_t state_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

// mean + sqrt(cov) * z with z standard normal. Accepts PSD (possibly
// singular) covariances.
Vector sample_gaussian(const Vector& mean, const Matrix& cov, CounterRng& rng);

}  // namespace tlqg
