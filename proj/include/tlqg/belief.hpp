#pragma once

#include <cstdint>
#include <vector>

#include "tlqg/common.hpp"
#include "tlqg/models.hpp"
#include "tlqg/trajectory.hpp"

namespace tlqg {

struct GaussianBelief {
  Vector mean;
  Matrix covariance;  // symmetric PSD; ops below re-symmetrize after updates
};

GaussianBelief make_belief(Vector mean, Matrix covariance);

// One planning-stage covariance update:
//   P- = A P A' + G Sw G'
//   S  = H P- H' + M Sv M'
//   K  = P- H' S^-1
//   P+ = (I - K H) P-
struct RiccatiStep {
  Matrix p_minus;
  Matrix s;
  Matrix k;
  Matrix p_plus;
};

RiccatiStep riccati_step(const Matrix& prev, const Matrix& a, const Matrix& g,
                         const Matrix& h, const Matrix& m,
                         const NoiseSpec& noise);

// Chains riccati_step along a trajectory; the motion Jacobians for the
// transition into time t are taken at (states[t-1], controls[t-1]) and the
// observation Jacobians at states[t]. Pure function of the trajectory.
std::vector<RiccatiStep> propagate_nominal_covariance(
    const NominalTrajectory& traj, const MotionModel& motion,
    const ObservationModel& obs, const NoiseSpec& noise, const Matrix& p0);

// Per-step quadratic weights, t = 1..K. w_chol[t] satisfies
// w_chol' * w_chol = w_x (pivoted factorization, PSD inputs allowed).
struct CostWeights {
  std::vector<Matrix> w_x;
  std::vector<Matrix> w_u;
  std::vector<Matrix> w_chol;

  int horizon() const { return static_cast<int>(w_x.size()); }

  static CostWeights constant(const Matrix& wx, const Matrix& wu, int horizon);
};

Matrix psd_cholesky_factor(const Matrix& wx);

// Linearization data for one execution-filter update t -> t+1.
struct KfLinearization {
  Matrix a;         // A at (x^o_t, u^o_t)
  Matrix b;         // B at (x^o_t, u^o_t)
  Matrix h;         // H at x^o_{t+1}
  Vector f_offset;  // f(x^o_t, u^o_t, 0) - A x^o_t - B u^o_t
  Vector h_offset;  // h(x^o_{t+1}, 0) - H x^o_{t+1}
};

// Mean update of the execution filter:
//   m+ = (I - K H) f_off - K h_off + A m + B u + K (z - H (A m + B u))
Vector kf_mean_update(const Vector& mean, const Vector& control,
                      const Vector& observation, const KfLinearization& lin,
                      const Matrix& gain);

// Execution-stage forward recursion (predictor form, note the leading A in
// the gain and the process noise inside the outer A (...) A'):
//   K  = A P H' (H P H' + M Sv M')^-1
//   P+ = A (P - P H' (H P H' + M Sv M')^-1 H P + G Sw G') A'
struct ForwardRiccati {
  Matrix gain;
  Matrix next_covariance;
};

ForwardRiccati forward_riccati_step(const Matrix& p, const Matrix& a,
                                    const Matrix& g, const Matrix& h,
                                    const Matrix& m, const NoiseSpec& noise);

// Average of the two Gaussian KL divergences; zero for equal beliefs, and
// for equal covariances reduces to 0.5 * dm' P^-1 dm.
double symmetric_kl_distance(const GaussianBelief& b1, const GaussianBelief& b2);

// Monte-Carlo estimate of Pr(|x_pos - goal_pos| < radius) under the belief,
// over the first min(2, n_x) coordinates. Deterministic given the seed.
double goal_probability(const GaussianBelief& b, const Vector& goal,
                        double radius, int samples, std::uint64_t seed);

}  // namespace tlqg
