#include "tlqg/controller.hpp"

#include <sstream>

namespace tlqg {

LqrStep lqr_step(const Matrix& value_next, const Matrix& a, const Matrix& b,
                 const Matrix& wx, const Matrix& wu) {
  const Matrix btp = b.transpose() * value_next;
  const Matrix denom = wu + btp * b;
  Eigen::LDLT<Matrix> ldlt(symmetrized(denom));
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw NumericalError("lqr_step: Wu + B'PB is not positive definite");
  }
  LqrStep step;
  step.gain = ldlt.solve(btp * a);
  step.value =
      symmetrized(a.transpose() * value_next * a -
                  a.transpose() * value_next * b * step.gain + wx);
  return step;
}

void backward_riccati(const NominalTrajectory& traj, const MotionModel& motion,
                      const CostWeights& weights,
                      std::vector<Matrix>* value_matrices,
                      std::vector<Matrix>* gains) {
  const int horizon = traj.horizon();
  if (weights.horizon() != horizon) {
    throw ConfigError("backward_riccati: weights not dimensioned for horizon");
  }
  for (const Matrix& wu : weights.w_u) {
    if (min_eigenvalue(wu) <= 0.0) {
      throw NumericalError("backward_riccati: Wu must be strictly positive definite");
    }
  }

  value_matrices->assign(horizon + 1, Matrix());
  gains->assign(horizon, Matrix());
  (*value_matrices)[horizon] = weights.w_x.back();
  for (int t = horizon - 1; t >= 0; --t) {
    const MotionJacobians mj = motion.jacobians(traj.states[t], traj.controls[t]);
    const LqrStep step = lqr_step((*value_matrices)[t + 1], mj.a, mj.b,
                                  weights.w_x[t], weights.w_u[t]);
    (*gains)[t] = step.gain;
    (*value_matrices)[t] = step.value;
  }
}

Vector control_action(const LqgPolicy& policy, int t, const Vector& estimate) {
  if (t < 0 || t >= policy.nominal.horizon()) {
    std::ostringstream msg;
    msg << "control_action: time index " << t << " outside [0, "
        << policy.nominal.horizon() << ")";
    throw std::out_of_range(msg.str());
  }
  return policy.nominal.controls[t] -
         policy.gains[t] * (estimate - policy.nominal.states[t]);
}

LqgPolicy make_lqg_policy(const NominalTrajectory& traj,
                          const MotionModel& motion,
                          const ObservationModel& obs, const NoiseSpec& noise,
                          const CostWeights& weights, const Matrix& p0) {
  LqgPolicy policy;
  policy.nominal = traj;
  backward_riccati(traj, motion, weights, &policy.value_matrices, &policy.gains);

  const int horizon = traj.horizon();
  policy.nominal_covariances.assign(horizon + 1, Matrix());
  policy.nominal_covariances[0] = symmetrized(p0);
  policy.kalman_gains.assign(horizon, Matrix());
  for (int t = 0; t < horizon; ++t) {
    const MotionJacobians mj = motion.jacobians(traj.states[t], traj.controls[t]);
    const ObservationJacobians oj = obs.jacobians(traj.states[t]);
    const ForwardRiccati fr = forward_riccati_step(
        policy.nominal_covariances[t], mj.a, mj.g, oj.h, oj.m, noise);
    policy.nominal_covariances[t + 1] = fr.next_covariance;
  }
  // Gains indexed t = 1..K; the control index in A^o_t is clamped at K-1.
  for (int t = 1; t <= horizon; ++t) {
    const int uc = std::min(t, horizon - 1);
    const MotionJacobians mj = motion.jacobians(traj.states[t], traj.controls[uc]);
    const ObservationJacobians oj = obs.jacobians(traj.states[t]);
    const Matrix& p = policy.nominal_covariances[t];
    const Matrix s = symmetrized(oj.h * p * oj.h.transpose() +
                                 oj.m * noise.sigma_nu * oj.m.transpose());
    policy.kalman_gains[t - 1] =
        mj.a * p * oj.h.transpose() * invert_innovation(s);
  }
  return policy;
}

}  // namespace tlqg
