#include "tlqg/executor.hpp"

namespace tlqg {

std::string to_string(ExecutionStatus status) {
  switch (status) {
    case ExecutionStatus::kGoalReached: return "goal_reached";
    case ExecutionStatus::kStepBudgetExhausted: return "step_budget_exhausted";
    case ExecutionStatus::kAbortedPlannerFailure: return "aborted_planner_failure";
  }
  return "unknown";
}

std::pair<Vector, Vector> simulate_step(const Vector& true_state,
                                        const Vector& control,
                                        const MotionModel& motion,
                                        const ObservationModel& obs,
                                        const NoiseSpec& noise,
                                        CounterRng& rng) {
  const Vector w = sample_gaussian(Vector::Zero(motion.noise_dim),
                                   noise.sigma_omega, rng);
  const Vector v = sample_gaussian(Vector::Zero(obs.noise_dim),
                                   noise.sigma_nu, rng);
  Vector next = motion.evaluate(true_state, control, w);
  Vector z = obs.evaluate(next, v);
  return {std::move(next), std::move(z)};
}

std::pair<double, bool> detect_deviation(const GaussianBelief& current,
                                         const GaussianBelief& nominal,
                                         double threshold) {
  const double d = symmetric_kl_distance(current, nominal);
  return {d, d > threshold};
}

namespace {

// Zero-noise runs collapse covariances to singular; fall back to a jittered
// KL so the deviation metric stays defined (identical beliefs still give 0).
double robust_kl(const GaussianBelief& a, const GaussianBelief& b) {
  try {
    return symmetric_kl_distance(a, b);
  } catch (const NumericalError&) {
    const int n = static_cast<int>(a.mean.size());
    GaussianBelief aj = a;
    GaussianBelief bj = b;
    aj.covariance += 1e-12 * Matrix::Identity(n, n);
    bj.covariance += 1e-12 * Matrix::Identity(n, n);
    return symmetric_kl_distance(aj, bj);
  }
}

KfLinearization linearize_for_update(const MotionModel& motion,
                                     const ObservationModel& obs,
                                     const NominalTrajectory& nominal, int t) {
  const Vector& x_t = nominal.states[t];
  const Vector& u_t = nominal.controls[t];
  const Vector& x_next = nominal.states[t + 1];
  const MotionJacobians mj = motion.jacobians(x_t, u_t);
  const ObservationJacobians oj = obs.jacobians(x_next);

  KfLinearization lin;
  lin.a = mj.a;
  lin.b = mj.b;
  lin.h = oj.h;
  const Vector zero_w = Vector::Zero(motion.noise_dim);
  lin.f_offset = motion.evaluate(x_t, u_t, zero_w) - mj.a * x_t - mj.b * u_t;
  const Vector zero_v = Vector::Zero(obs.noise_dim);
  lin.h_offset = obs.evaluate(x_next, zero_v) - oj.h * x_next;
  return lin;
}

}  // namespace

ExecutionTrace run_tlqg(
    const PlanningProblem& problem, const ExecutionConfig& config,
    const SolverOptions& options, const NominalTrajectory* initial_plan,
    const std::function<void(const PlanningProblem&, const PlanResult&)>&
        plan_observer) {
  const int budget = config.step_budget > 0 ? config.step_budget
                                            : 10 * problem.horizon;
  ExecutionTrace trace;
  trace.seed = config.seed;

  CounterRng rng(CounterRng::derive(config.seed, 0));
  GaussianBelief belief = make_belief(problem.x0_mean, problem.p0);
  Vector true_state = sample_gaussian(belief.mean, belief.covariance, rng);

  LqgPolicy policy;
  bool has_plan = false;
  bool pending_replan_flag = false;
  bool active_plan_warning = false;
  int plans_made = 0;
  int consecutive_failures = 0;
  int t = 0;        // time within the active plan
  int steps = 0;    // executed steps
  double kl = 0.0;

  while (true) {
    const double p_goal = goal_probability(
        belief, problem.goal, problem.goal_radius,
        config.goal_probability_samples,
        CounterRng::derive(config.seed, 1000 + steps));
    trace.final_goal_probability = p_goal;
    if (p_goal > config.goal_probability_threshold) {
      trace.status = ExecutionStatus::kGoalReached;
      break;
    }
    if (steps >= budget) {
      trace.status = ExecutionStatus::kStepBudgetExhausted;
      break;
    }

    bool deviated = false;
    if (has_plan) {
      const GaussianBelief nominal = make_belief(
          policy.nominal.states[t], policy.nominal_covariances[t]);
      kl = robust_kl(belief, nominal);
      deviated = kl > config.deviation_threshold;
    }

    if (!has_plan || t == problem.horizon || deviated) {
      PlanningProblem local = problem;
      local.x0_mean = belief.mean;
      local.p0 = belief.covariance;

      NominalTrajectory planned;
      bool warn = false;
      if (initial_plan != nullptr && !has_plan) {
        planned = *initial_plan;
      } else {
        const PlanResult plan =
            solve(local, straight_line_seed(local), options);
        if (plan_observer) {
          plan_observer(local, plan);
        }
        planned = plan.trajectory;
        warn = !plan.converged;
      }
      if (warn) {
        ++trace.planner_warnings;
        if (++consecutive_failures >= 3) {
          trace.status = ExecutionStatus::kAbortedPlannerFailure;
          break;
        }
      } else {
        consecutive_failures = 0;
      }
      policy = make_lqg_policy(planned, problem.motion, problem.obs,
                               problem.noise, problem.weights,
                               belief.covariance);
      has_plan = true;
      active_plan_warning = warn;
      if (plans_made > 0) {
        ++trace.replans;
        pending_replan_flag = true;
      }
      ++plans_made;
      t = 0;
      kl = 0.0;
      continue;
    }

    const Vector control = control_action(policy, t, belief.mean);
    auto [next_state, observation] = simulate_step(
        true_state, control, problem.motion, problem.obs, problem.noise, rng);
    true_state = next_state;

    const KfLinearization lin =
        linearize_for_update(problem.motion, problem.obs, policy.nominal, t);
    const Vector mean = kf_mean_update(belief.mean, control, observation, lin,
                                       policy.kalman_gains[t]);
    belief = make_belief(mean, policy.nominal_covariances[t + 1]);
    ++t;
    ++steps;

    const GaussianBelief nominal = make_belief(
        policy.nominal.states[t], policy.nominal_covariances[t]);
    kl = robust_kl(belief, nominal);

    ExecutionRecord rec;
    rec.step = steps;
    rec.plan_time = t;
    rec.true_state = true_state;
    rec.estimate_mean = belief.mean;
    rec.control = control;
    rec.observation = observation;
    rec.covariance_trace = belief.covariance.trace();
    rec.kl_distance = kl;
    rec.replanned = pending_replan_flag;
    rec.planner_warning = active_plan_warning;
    pending_replan_flag = false;
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

}  // namespace tlqg
