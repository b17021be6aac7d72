#pragma once

#include <cstdint>
#include <vector>

#include "tlqg/belief.hpp"
#include "tlqg/common.hpp"
#include "tlqg/models.hpp"
#include "tlqg/rng.hpp"

namespace tlqg {

// Linear time-varying closed-loop system for the non-recursive error
// propagation checks. Index conventions:
//   a, b, g          t = 0..K-1
//   h, m             t = 1..K   (slot 0 unused)
//   kalman_gains     t = 1..K   (slot 0 unused), filter form, derived from
//                    the covariance recursion of this same system
//   lqr_gains        t = 0..K-1 with lqr_gains[0] = 0 (u~_0 = 0)
struct LtvSystem {
  int horizon = 0;
  int nx = 0, nu = 0, nz = 0;
  std::vector<Matrix> a, b, g;
  std::vector<Matrix> h, m;
  NoiseSpec noise;
  Matrix initial_covariance;
  std::vector<Matrix> kalman_gains;
  std::vector<Matrix> lqr_gains;

  int noise_dim_omega() const { return static_cast<int>(g[0].cols()); }
  int noise_dim_nu() const { return static_cast<int>(m[1].cols()); }
};

// Random stable system with gains derived via the belief/controller
// recursions (Kalman from riccati_step, LQR from lqr_step).
LtvSystem make_random_ltv(int nx, int nu, int nz, int horizon,
                          const Matrix& wx, const Matrix& wu, CounterRng& rng);

// One draw of the independent variables: initial state error and the two
// noise sequences.
struct ErrorRealization {
  Vector x0_error;
  std::vector<Vector> process_noise;      // w_t, t = 0..K-1
  std::vector<Vector> observation_noise;  // v_t, t = 1..K (slot 0 unused)
};

ErrorRealization sample_realization(const LtvSystem& sys, CounterRng& rng);

// Step-by-step simulation of the linearized closed-loop error dynamics:
//   u~_t = -L_t (x~_t - xe_t)        (estimate error xe = x - xhat)
//   x~_{t+1} = A x~_t + B u~_t + G w_t
//   xe_{t+1} = (I - K H) A xe_t + (I - K H) G w_t - K M v_{t+1}
//   z~_{t+1} = H x~_{t+1} + M v_{t+1}
struct ErrorSequences {
  std::vector<Vector> state_error;        // x~_t, t = 0..K
  std::vector<Vector> estimation_error;   // xe_t, t = 0..K
  std::vector<Vector> control_error;      // u~_t, t = 0..K-1
  std::vector<Vector> observation_error;  // z~_t, t = 1..K (slot 0 unused)
};

ErrorSequences recursive_errors(const LtvSystem& sys,
                                const ErrorRealization& real);

// Composite-matrix building blocks. Products run with descending index on
// the left (M[t2] ... M[t1]); empty products are identity, empty sums zero.
Matrix product_descending(const std::vector<Matrix>& factors, int t1, int t2,
                          int dim);

// Closed forms of the non-recursive propagations. Valid index ranges:
// lemma1/lemma2 t in [-1, K-1], lemma3 t in [-1, K-2], lemma4 t in [0, K-1].
Vector lemma1_estimation_error(const LtvSystem& sys,
                               const ErrorRealization& real, int t);
Vector lemma2_state_error(const LtvSystem& sys, const ErrorRealization& real,
                          int t);
Vector lemma3_control_error(const LtvSystem& sys, const ErrorRealization& real,
                            int t);
Vector lemma4_observation_error(const LtvSystem& sys,
                                const ErrorRealization& real, int t);

// Belief vectorization for the update-map Jacobians: stacked mean followed
// by the upper triangle of the covariance (row-major, i <= j).
int belief_dim(int nx);
Vector belief_to_vector(const Vector& mean, const Matrix& covariance);
void vector_to_belief(const Vector& bvec, int nx, Vector* mean,
                      Matrix* covariance);

// Filter-form KF update of the stacked belief vector for step t -> t+1.
Vector kf_belief_map(const LtvSystem& sys, int t, const Vector& bvec,
                     const Vector& control, const Vector& observation);

// Jacobians of the update map at the nominal trajectory (zero means, the
// covariance path of the system), by central finite differences.
struct BeliefJacobians {
  std::vector<Matrix> t_b;  // t = 0..K-1
  std::vector<Matrix> t_u;
  std::vector<Matrix> t_z;
};

BeliefJacobians belief_jacobians_fd(const LtvSystem& sys, double step = 1e-6);

// Oracle: b~_{t+1} = T^b b~_t + T^u u~_t + T^z z~_{t+1}, b~_0 = 0.
std::vector<Vector> recursive_belief_errors(const LtvSystem& sys,
                                            const ErrorRealization& real,
                                            const BeliefJacobians& jac);

// Closed form of the belief error at time t in [0, K].
Vector lemma5_belief_error(const LtvSystem& sys, const ErrorRealization& real,
                           int t, const BeliefJacobians& jac);

// Monte-Carlo check that the first-order cost error has zero mean:
//   J~ = sum_t (Cb_t . b~_t + Cu_t . u~_t) + Cb_K . b~_K
struct Theorem1Result {
  double mean = 0.0;
  double standard_error = 0.0;
};

Theorem1Result theorem1_cost_error_check(const LtvSystem& sys,
                                         const std::vector<Vector>& cost_b,
                                         const std::vector<Vector>& cost_u,
                                         int samples, std::uint64_t seed,
                                         const Vector& x0_bias = Vector());

}  // namespace tlqg
