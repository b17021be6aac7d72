#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tlqg/belief.hpp"
#include "tlqg/common.hpp"
#include "tlqg/controller.hpp"
#include "tlqg/planner.hpp"
#include "tlqg/rng.hpp"

namespace tlqg {

enum class ExecutionStatus {
  kGoalReached,
  kStepBudgetExhausted,
  kAbortedPlannerFailure,
};

std::string to_string(ExecutionStatus status);

struct ExecutionRecord {
  int step = 0;       // executed-step counter across the run
  int plan_time = 0;  // t within the active plan, after the update
  Vector true_state;
  Vector estimate_mean;
  Vector control;
  Vector observation;
  double covariance_trace = 0.0;
  double kl_distance = 0.0;
  bool replanned = false;       // a replan happened right before this step
  bool planner_warning = false; // the active plan came from a non-converged solve
};

struct ExecutionConfig {
  double deviation_threshold = 2.0;        // d_th
  double goal_probability_threshold = 0.9; // p_g
  int step_budget = 0;                     // 0 means 10 * K
  std::uint64_t seed = 0;
  int goal_probability_samples = 10000;
};

struct ExecutionTrace {
  std::vector<ExecutionRecord> records;
  ExecutionStatus status = ExecutionStatus::kStepBudgetExhausted;
  std::uint64_t seed = 0;
  int replans = 0;           // plans after the initial one
  int planner_warnings = 0;  // non-converged solves executed anyway
  double final_goal_probability = 0.0;
};

// Draw w ~ N(0, Sw), v ~ N(0, Sv) and advance the true system one step.
std::pair<Vector, Vector> simulate_step(const Vector& true_state,
                                        const Vector& control,
                                        const MotionModel& motion,
                                        const ObservationModel& obs,
                                        const NoiseSpec& noise,
                                        CounterRng& rng);

// d = symmetric KL distance; deviated when d > threshold.
std::pair<double, bool> detect_deviation(const GaussianBelief& current,
                                         const GaussianBelief& nominal,
                                         double threshold);

// Closed control loop: plan, track with the LQR policy, filter, replan on
// deviation or plan expiry, stop at goal probability or budget. Bit-identical
// for identical inputs and seed. An initial plan, when given, replaces the
// first solve; the observer, when given, sees every internal solve result.
ExecutionTrace run_tlqg(
    const PlanningProblem& problem, const ExecutionConfig& config,
    const SolverOptions& options,
    const NominalTrajectory* initial_plan = nullptr,
    const std::function<void(const PlanningProblem&, const PlanResult&)>&
        plan_observer = {});

}  // namespace tlqg
