#pragma once

#include <vector>

#include "tlqg/belief.hpp"
#include "tlqg/common.hpp"
#include "tlqg/models.hpp"
#include "tlqg/trajectory.hpp"

namespace tlqg {

// Tracking policy around an optimized trajectory. Gains depend only on the
// trajectory and the weights, never on observations or beliefs. Immutable
// after construction.
struct LqgPolicy {
  NominalTrajectory nominal;
  std::vector<Matrix> gains;                // L_t, t = 0..K-1
  std::vector<Matrix> kalman_gains;         // K^o_t, t = 1..K (execution filter)
  std::vector<Matrix> value_matrices;       // P^f_t, t = 0..K
  std::vector<Matrix> nominal_covariances;  // P^o_t, t = 0..K (forward Riccati)
};

// One backward step:
//   L = (Wu + B' P B)^-1 B' P A
//   P- = A' P A - A' P B L + Wx
struct LqrStep {
  Matrix value;
  Matrix gain;
};

LqrStep lqr_step(const Matrix& value_next, const Matrix& a, const Matrix& b,
                 const Matrix& wx, const Matrix& wu);

// Backward Riccati along the trajectory with terminal condition
// P^f_K = W^x_K. Jacobians for the gain at time t are taken at
// (states[t], controls[t]). Wu must be strictly positive definite.
void backward_riccati(const NominalTrajectory& traj, const MotionModel& motion,
                      const CostWeights& weights,
                      std::vector<Matrix>* value_matrices,
                      std::vector<Matrix>* gains);

// u_t = u^o_t - L_t (estimate - x^o_t).
Vector control_action(const LqgPolicy& policy, int t, const Vector& estimate);

// Assembles the tracking gains plus the execution-filter gain/covariance
// sequence along the trajectory, starting from p0.
LqgPolicy make_lqg_policy(const NominalTrajectory& traj,
                          const MotionModel& motion,
                          const ObservationModel& obs, const NoiseSpec& noise,
                          const CostWeights& weights, const Matrix& p0);

}  // namespace tlqg
