#pragma once

#include <optional>
#include <vector>

#include "tlqg/belief.hpp"
#include "tlqg/common.hpp"
#include "tlqg/models.hpp"
#include "tlqg/obstacles.hpp"
#include "tlqg/trajectory.hpp"

namespace tlqg {

struct PlanningProblem {
  MotionModel motion;
  ObservationModel obs;
  NoiseSpec noise;
  Vector x0_mean;
  Matrix p0;
  CostWeights weights;
  Vector goal;
  double goal_radius = 0.1;
  // The terminal constraint is strict, so planning targets the ball shrunk
  // by this fraction; a larger margin leaves room for execution noise.
  double goal_margin = 0.05;
  double control_radius = 1.0;
  int horizon = 1;
  std::optional<ObstacleSet> obstacles;
  double obstacle_weight = 1.0;
};

struct LineSearchOptions {
  double backtrack = 0.5;
  double armijo = 1e-4;
  int max_backtracks = 40;
};

struct SolverOptions {
  int max_iterations = 100;      // quasi-Newton iterations per penalty round
  double gradient_step = 1e-7;   // scaled by (1 + |controls|)
  double penalty_initial = 10.0;
  double penalty_growth = 10.0;
  int penalty_rounds = 6;
  double convergence_tol = 1e-6; // gradient-norm stopping threshold
  LineSearchOptions line_search;
};

struct PlanResult {
  NominalTrajectory trajectory;
  double cost = 0.0;
  double constraint_violation = 0.0;  // max of terminal-ball and control residuals
  int iterations = 0;
  bool converged = false;         // stopped by its own rule with feasible constraints
  double final_gradient_norm = 0.0;
  std::vector<double> merit_history;  // best-so-far merit after each penalty round
  double seed_cost = 0.0;
  double estimation_cost = 0.0;
  double control_cost = 0.0;
  double obstacle_cost_total = 0.0;
  std::vector<double> covariance_traces;  // tr(P+_t), t = 1..K
};

// Deterministic rollout x_{t+1} = f(x_t, u_t, 0) from x0.
NominalTrajectory propagate_nominal(const Vector& x0,
                                    const std::vector<Vector>& controls,
                                    const MotionModel& motion);

// sum_t [ tr(Wx_t P+_t) + u_{t-1}' Wu_t u_{t-1} ] + w_obs * segment costs,
// with P+ from the covariance recursion along the rollout. Pure in controls.
double plan_cost(const PlanningProblem& problem,
                 const std::vector<Vector>& controls);

struct PlanCostBreakdown {
  double total = 0.0;
  double estimation = 0.0;
  double control = 0.0;
  double obstacle = 0.0;
  std::vector<double> covariance_traces;
};

PlanCostBreakdown plan_cost_breakdown(const PlanningProblem& problem,
                                      const std::vector<Vector>& controls);

// Central finite differences of plan_cost, step = gradient_step * (1 + |u|).
Vector cost_gradient(const PlanningProblem& problem,
                     const std::vector<Vector>& controls,
                     const SolverOptions& options);

// Least-squares inversion of the noiseless model toward equally spaced
// waypoints from the initial mean to the goal; controls clipped to the
// control-norm bound.
std::vector<Vector> straight_line_seed(const PlanningProblem& problem);

// Same inversion along a polyline x0 -> waypoints -> goal, for scenarios
// where the straight line starts inside a barrier region.
std::vector<Vector> waypoint_seed(const PlanningProblem& problem,
                                  const std::vector<Vector>& waypoints);

// Quadratic-penalty outer loop around a BFGS inner descent with backtracking
// line search. Returns the best iterate found; the recorded merit history is
// non-increasing.
PlanResult solve(const PlanningProblem& problem,
                 const std::vector<Vector>& seed_controls,
                 const SolverOptions& options);

}  // namespace tlqg
