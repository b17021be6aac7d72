#include "tlqg/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace tlqg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector flatten(const std::vector<Vector>& controls) {
  if (controls.empty()) {
    return Vector();
  }
  const int nu = static_cast<int>(controls[0].size());
  Vector flat(static_cast<int>(controls.size()) * nu);
  for (size_t t = 0; t < controls.size(); ++t) {
    flat.segment(static_cast<int>(t) * nu, nu) = controls[t];
  }
  return flat;
}

std::vector<Vector> unflatten(const Vector& flat, int horizon, int nu) {
  std::vector<Vector> controls(horizon);
  for (int t = 0; t < horizon; ++t) {
    controls[t] = flat.segment(t * nu, nu);
  }
  return controls;
}

}  // namespace

NominalTrajectory propagate_nominal(const Vector& x0,
                                    const std::vector<Vector>& controls,
                                    const MotionModel& motion) {
  NominalTrajectory traj;
  traj.states.reserve(controls.size() + 1);
  traj.states.push_back(x0);
  traj.controls = controls;
  const Vector zero_noise = Vector::Zero(motion.noise_dim);
  for (size_t t = 0; t < controls.size(); ++t) {
    Vector next = motion.evaluate(traj.states.back(), controls[t], zero_noise);
    if (!next.allFinite()) {
      std::ostringstream msg;
      msg << "rollout produced a non-finite state at step " << t + 1;
      throw EvaluationError(msg.str());
    }
    traj.states.push_back(std::move(next));
  }
  return traj;
}

PlanCostBreakdown plan_cost_breakdown(const PlanningProblem& problem,
                                      const std::vector<Vector>& controls) {
  if (static_cast<int>(controls.size()) != problem.horizon) {
    throw ConfigError("plan_cost: control count does not match the horizon");
  }
  const NominalTrajectory traj =
      propagate_nominal(problem.x0_mean, controls, problem.motion);
  const std::vector<RiccatiStep> steps = propagate_nominal_covariance(
      traj, problem.motion, problem.obs, problem.noise, problem.p0);

  PlanCostBreakdown out;
  out.covariance_traces.reserve(problem.horizon);
  for (int t = 1; t <= problem.horizon; ++t) {
    // tr(W P+ W') = tr(Wx P+) with Wx = W'W.
    const double est = (problem.weights.w_x[t - 1] * steps[t - 1].p_plus).trace();
    const double ctrl =
        controls[t - 1].dot(problem.weights.w_u[t - 1] * controls[t - 1]);
    out.estimation += est;
    out.control += ctrl;
    out.covariance_traces.push_back(steps[t - 1].p_plus.trace());
  }
  if (problem.obstacles && problem.obstacle_weight > 0.0 &&
      !problem.obstacles->ellipsoids.empty()) {
    const int d =
        static_cast<int>(problem.obstacles->ellipsoids[0].center.size());
    for (int t = 1; t <= problem.horizon; ++t) {
      out.obstacle += obstacle_cost(*problem.obstacles,
                                    traj.states[t - 1].head(d),
                                    traj.states[t].head(d));
    }
    out.obstacle *= problem.obstacle_weight;
  }
  out.total = out.estimation + out.control + out.obstacle;
  return out;
}

double plan_cost(const PlanningProblem& problem,
                 const std::vector<Vector>& controls) {
  return plan_cost_breakdown(problem, controls).total;
}

Vector cost_gradient(const PlanningProblem& problem,
                     const std::vector<Vector>& controls,
                     const SolverOptions& options) {
  const int nu = problem.motion.control_dim;
  Vector flat = flatten(controls);
  const double step = options.gradient_step * (1.0 + flat.norm());
  Vector grad(flat.size());
  for (int j = 0; j < flat.size(); ++j) {
    Vector hi = flat;
    Vector lo = flat;
    hi[j] += step;
    lo[j] -= step;
    double chi = 0.0, clo = 0.0;
    try {
      chi = plan_cost(problem, unflatten(hi, problem.horizon, nu));
      clo = plan_cost(problem, unflatten(lo, problem.horizon, nu));
    } catch (const std::runtime_error& e) {
      throw NumericalError("cost_gradient: perturbed cost failed at coordinate " +
                           std::to_string(j) + ": " + e.what());
    }
    if (!std::isfinite(chi) || !std::isfinite(clo)) {
      throw NumericalError("cost_gradient: non-finite perturbed cost at coordinate " +
                           std::to_string(j));
    }
    grad[j] = (chi - clo) / (2.0 * step);
  }
  return grad;
}

namespace {

// Track a polyline of targets by least-squares inversion of the linearized
// noiseless model, clipping each control to the norm bound.
std::vector<Vector> track_targets(const PlanningProblem& problem,
                                  const std::vector<Vector>& targets) {
  const Vector zero_u = Vector::Zero(problem.motion.control_dim);
  const Vector zero_w = Vector::Zero(problem.motion.noise_dim);
  std::vector<Vector> controls;
  controls.reserve(targets.size());
  Vector x = problem.x0_mean;
  for (const Vector& target : targets) {
    const MotionJacobians mj = problem.motion.jacobians(x, zero_u);
    const Vector drift = problem.motion.evaluate(x, zero_u, zero_w);
    Vector u = mj.b.completeOrthogonalDecomposition().solve(target - drift);
    const double norm = u.norm();
    if (norm > problem.control_radius) {
      u *= problem.control_radius / norm;
    }
    x = problem.motion.evaluate(x, u, zero_w);
    controls.push_back(std::move(u));
  }
  return controls;
}

}  // namespace

std::vector<Vector> straight_line_seed(const PlanningProblem& problem) {
  std::vector<Vector> targets;
  targets.reserve(problem.horizon);
  for (int t = 1; t <= problem.horizon; ++t) {
    const double s = static_cast<double>(t) / problem.horizon;
    targets.push_back(problem.x0_mean + s * (problem.goal - problem.x0_mean));
  }
  return track_targets(problem, targets);
}

std::vector<Vector> waypoint_seed(const PlanningProblem& problem,
                                  const std::vector<Vector>& waypoints) {
  if (waypoints.empty()) {
    return straight_line_seed(problem);
  }
  // Arc-length parametrization of x0 -> waypoints -> goal, sampled at K
  // equally spaced stations.
  std::vector<Vector> knots;
  knots.push_back(problem.x0_mean);
  for (const Vector& w : waypoints) {
    knots.push_back(w);
  }
  knots.push_back(problem.goal);
  std::vector<double> cum{0.0};
  for (size_t i = 1; i < knots.size(); ++i) {
    cum.push_back(cum.back() + (knots[i] - knots[i - 1]).norm());
  }
  const double total = cum.back();
  std::vector<Vector> targets;
  targets.reserve(problem.horizon);
  for (int t = 1; t <= problem.horizon; ++t) {
    const double s = total * t / problem.horizon;
    size_t seg = 1;
    while (seg + 1 < cum.size() && cum[seg] < s) {
      ++seg;
    }
    const double denom = std::max(cum[seg] - cum[seg - 1], 1e-12);
    const double frac = (s - cum[seg - 1]) / denom;
    targets.push_back(knots[seg - 1] + frac * (knots[seg] - knots[seg - 1]));
  }
  return track_targets(problem, targets);
}

namespace {

// Constraint residuals of Problem 2: terminal ball and control saturation.
struct PenaltyEval {
  double sum_sq = 0.0;
  double max_residual = 0.0;
};

PenaltyEval penalty_eval(const PlanningProblem& problem,
                         const std::vector<Vector>& controls) {
  PenaltyEval out;
  const NominalTrajectory traj =
      propagate_nominal(problem.x0_mean, controls, problem.motion);
  // The terminal constraint is strict; target inside the ball so a converged
  // plan (slack <= 1e-4) satisfies |x_K - x_g| < r_g with room to spare.
  const double radius =
      problem.goal_radius * (1.0 - std::clamp(problem.goal_margin, 0.002, 0.9));
  const double term =
      std::max(0.0, (traj.states.back() - problem.goal).norm() - radius);
  out.sum_sq += term * term;
  out.max_residual = term;
  for (const Vector& u : controls) {
    const double r = std::max(0.0, u.norm() - problem.control_radius);
    out.sum_sq += r * r;
    out.max_residual = std::max(out.max_residual, r);
  }
  return out;
}

struct InnerResult {
  Vector u;
  double value = kInf;
  double grad_norm = kInf;
  int iterations = 0;
  bool grad_converged = false;
  bool stalled = false;   // line search exhausted: the solver's numerical floor
  bool ftol_settled = false;  // whole round improved less than the tolerance
};

// BFGS with backtracking Armijo line search; accepted steps never increase
// the merit value.
// h_inv carries the quasi-Newton curvature across penalty rounds; it is
// reset by the caller when the landscape changes materially.
template <typename Func, typename Grad, typename Visit>
InnerResult bfgs_minimize(const Func& value_fn, const Grad& grad_fn,
                          const Visit& on_accept, Vector u0, Matrix& h_inv,
                          const SolverOptions& options) {
  InnerResult res;
  res.u = std::move(u0);
  res.value = value_fn(res.u);
  const double initial_value = res.value;
  const int n = static_cast<int>(res.u.size());
  Vector grad = grad_fn(res.u);
  int tiny_steps = 0;

  for (int it = 0; it < options.max_iterations; ++it) {
    res.grad_norm = grad.norm();
    if (res.grad_norm <= options.convergence_tol * (1.0 + std::abs(res.value))) {
      res.grad_converged = true;
      break;
    }
    Vector dir = -(h_inv * grad);
    double slope = grad.dot(dir);
    if (!(slope < 0.0)) {
      h_inv.setIdentity();
      dir = -grad;
      slope = grad.dot(dir);
    }

    double alpha = 1.0;
    double candidate_value = kInf;
    Vector candidate;
    bool accepted = false;
    bool first_trial = true;
    for (int ls = 0; ls < options.line_search.max_backtracks; ++ls) {
      candidate = res.u + alpha * dir;
      candidate_value = value_fn(candidate);
      if (std::isfinite(candidate_value) &&
          candidate_value <=
              res.value + options.line_search.armijo * alpha * slope) {
        accepted = true;
        break;
      }
      first_trial = false;
      alpha *= options.line_search.backtrack;
    }
    if (accepted && first_trial) {
      // The unit step already works: extend while it keeps paying off
      // (handles near-linear slopes where the curvature update is skipped).
      double alpha_ext = 2.0 * alpha;
      for (int ext = 0; ext < 30; ++ext) {
        const Vector extended = res.u + alpha_ext * dir;
        const double extended_value = value_fn(extended);
        if (!std::isfinite(extended_value) ||
            extended_value >= candidate_value) {
          break;
        }
        candidate = extended;
        candidate_value = extended_value;
        alpha = alpha_ext;
        alpha_ext *= 2.0;
      }
    }
    ++res.iterations;
    if (!accepted) {
      res.stalled = true;
      break;
    }
    on_accept(candidate);

    const Vector grad_new = grad_fn(candidate);
    const Vector s = candidate - res.u;
    const Vector y = grad_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Matrix left = Matrix::Identity(n, n) - rho * s * y.transpose();
      h_inv = left * h_inv * left.transpose() + rho * s * s.transpose();
    }
    // Function-decrease tolerance: repeated microscopic improvements mean
    // the quasi-Newton loop has hit its numerical floor.
    if (res.value - candidate_value <= 1e-13 * (1.0 + std::abs(res.value))) {
      if (++tiny_steps >= 3) {
        res.u = candidate;
        res.value = candidate_value;
        grad = grad_new;
        res.stalled = true;
        break;
      }
    } else {
      tiny_steps = 0;
    }
    res.u = candidate;
    res.value = candidate_value;
    grad = grad_new;
  }
  res.grad_norm = grad.norm();
  if (!res.grad_converged) {
    res.grad_converged =
        res.grad_norm <= options.convergence_tol * (1.0 + std::abs(res.value));
  }
  res.ftol_settled = initial_value - res.value <=
                     options.convergence_tol * (1.0 + std::abs(res.value));
  return res;
}

}  // namespace

PlanResult solve(const PlanningProblem& problem,
                 const std::vector<Vector>& seed_controls,
                 const SolverOptions& options) {
  const int nu = problem.motion.control_dim;
  const int horizon = problem.horizon;
  if (static_cast<int>(seed_controls.size()) != horizon) {
    throw ConfigError("solve: seed control count does not match the horizon");
  }

  const auto objective = [&](const Vector& flat) -> double {
    try {
      return plan_cost(problem, unflatten(flat, horizon, nu));
    } catch (const std::runtime_error&) {
      return kInf;
    }
  };
  const auto violation_sq = [&](const Vector& flat) -> double {
    return penalty_eval(problem, unflatten(flat, horizon, nu)).sum_sq;
  };

  Vector u = flatten(seed_controls);
  const double seed_cost = objective(u);
  if (!std::isfinite(seed_cost)) {
    throw ConfigError("solve: seed rollout has non-finite cost");
  }

  const double mu_final =
      options.penalty_initial *
      std::pow(options.penalty_growth, options.penalty_rounds - 1);
  const auto merit_final = [&](const Vector& flat) {
    return objective(flat) + mu_final * violation_sq(flat);
  };

  PlanResult result;
  result.seed_cost = seed_cost;
  Vector best_u = u;
  double best_merit = merit_final(u);
  const auto consider = [&](const Vector& flat) {
    const double m = merit_final(flat);
    if (m < best_merit) {
      best_merit = m;
      best_u = flat;
    }
  };

  double mu = options.penalty_initial;
  bool last_settled = false;
  double last_grad_norm = kInf;
  Matrix h_inv = Matrix::Identity(u.size(), u.size());
  for (int round = 0; round < options.penalty_rounds; ++round) {
    const auto merit = [&](const Vector& flat) {
      return objective(flat) + mu * violation_sq(flat);
    };
    const auto merit_grad = [&](const Vector& flat) {
      const double step = options.gradient_step * (1.0 + flat.norm());
      Vector grad(flat.size());
      for (int j = 0; j < flat.size(); ++j) {
        Vector hi = flat;
        Vector lo = flat;
        hi[j] += step;
        lo[j] -= step;
        const double vhi = merit(hi);
        const double vlo = merit(lo);
        if (!std::isfinite(vhi) || !std::isfinite(vlo)) {
          throw NumericalError(
              "solve: non-finite merit probe at coordinate " + std::to_string(j));
        }
        grad[j] = (vhi - vlo) / (2.0 * step);
      }
      return grad;
    };

    InnerResult inner;
    try {
      inner = bfgs_minimize(merit, merit_grad, consider, u, h_inv, options);
    } catch (const NumericalError&) {
      break;  // keep the best iterate found so far
    }
    result.iterations += inner.iterations;
    last_settled = inner.grad_converged || inner.stalled || inner.ftol_settled;
    last_grad_norm = inner.grad_norm;
    if (std::getenv("TLQG_SOLVER_DEBUG") != nullptr) {
      std::fprintf(stderr,
                   "[round %d] mu=%g iters=%d grad=%g value=%.12g conv=%d stall=%d ftol=%d\n",
                   round, mu, inner.iterations, inner.grad_norm, inner.value,
                   int(inner.grad_converged), int(inner.stalled),
                   int(inner.ftol_settled));
    }
    consider(inner.u);
    result.merit_history.push_back(best_merit);
    u = best_u;  // warm-start the next round from the champion
    mu *= options.penalty_growth;
  }

  const std::vector<Vector> best_controls = unflatten(best_u, horizon, nu);
  const PlanCostBreakdown breakdown = plan_cost_breakdown(problem, best_controls);
  result.trajectory = propagate_nominal(problem.x0_mean, best_controls,
                                        problem.motion);
  result.cost = breakdown.total;
  result.estimation_cost = breakdown.estimation;
  result.control_cost = breakdown.control;
  result.obstacle_cost_total = breakdown.obstacle;
  result.covariance_traces = breakdown.covariance_traces;
  result.constraint_violation = penalty_eval(problem, best_controls).max_residual;
  result.final_gradient_norm = last_grad_norm;
  result.converged = last_settled && result.constraint_violation <= 1e-4;
  return result;
}

}  // namespace tlqg
