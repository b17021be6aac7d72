#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tlqg/executor.hpp"

using namespace tlqg;
using test::mat1;
using test::vec1;

namespace {

// Small planar problem used for closed-loop runs.
PlanningProblem youbot_problem(double noise_scale, double p0_scale) {
  PlanningProblem p;
  p.motion = youbot_motion(YoubotGeometry{}, 1.0);
  LandmarkMap map;
  map.landmarks.emplace_back(2.0, 2.0);
  p.obs = make_observation_model(ObservationKind::kRangeBearing, map, {});
  p.noise = {noise_scale * Matrix::Identity(3, 3),
             noise_scale * Matrix::Identity(2, 2)};
  p.x0_mean = Vector::Zero(3);
  p.p0 = p0_scale * Matrix::Identity(3, 3);
  p.weights = CostWeights::constant(Matrix::Identity(3, 3),
                                    0.01 * Matrix::Identity(4, 4), 6);
  p.goal = test::vec3(0.6, 0.4, 0.2);
  p.goal_radius = 0.1;
  p.control_radius = 10.0;
  p.horizon = 6;
  return p;
}

}  // namespace

TEST_CASE("simulate step") {
  const MotionModel motion = test::linear_motion(mat1(1.0), mat1(1.0), mat1(1.0));
  const ObservationModel obs = test::linear_observation(mat1(2.0), mat1(1.0));

  SUBCASE("zero noise reduces to the noiseless rollout") {
    const NoiseSpec none{mat1(0.0), mat1(0.0)};
    CounterRng rng(1);
    const auto [x, z] = simulate_step(vec1(1.0), vec1(0.5), motion, obs, none,
                                      rng);
    CHECK(x[0] == doctest::Approx(1.5));
    CHECK(z[0] == doctest::Approx(3.0));
  }
  SUBCASE("fixed seed is bit-identical") {
    const NoiseSpec noise{mat1(0.3), mat1(0.2)};
    CounterRng rng1(99);
    CounterRng rng2(99);
    for (int i = 0; i < 20; ++i) {
      const auto [x1, z1] =
          simulate_step(vec1(0.2), vec1(0.1), motion, obs, noise, rng1);
      const auto [x2, z2] =
          simulate_step(vec1(0.2), vec1(0.1), motion, obs, noise, rng2);
      CHECK(x1[0] == x2[0]);
      CHECK(z1[0] == z2[0]);
    }
  }
  SUBCASE("one-step noise is zero mean within the CLT bound") {
    const NoiseSpec noise{mat1(1.0), mat1(0.0)};
    CounterRng rng(7);
    const int samples = 100000;
    double sum = 0.0;
    for (int i = 0; i < samples; ++i) {
      const auto [x, z] =
          simulate_step(vec1(0.0), vec1(0.0), motion, obs, noise, rng);
      sum += x[0];
    }
    CHECK(std::abs(sum / samples) <= 4.0 / std::sqrt(double(samples)));
  }
}

TEST_CASE("detect deviation") {
  const GaussianBelief a = make_belief(vec1(0.0), mat1(1.0));
  SUBCASE("identical beliefs") {
    const auto [d, flag] = detect_deviation(a, a, 1.0);
    CHECK(d <= 1e-12);
    CHECK_FALSE(flag);
  }
  SUBCASE("mean gap two deviates at threshold one") {
    const GaussianBelief b = make_belief(vec1(2.0), mat1(1.0));
    const auto [d, flag] = detect_deviation(a, b, 1.0);
    CHECK(d == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(flag);
  }
  SUBCASE("mean gap one does not") {
    const GaussianBelief b = make_belief(vec1(1.0), mat1(1.0));
    const auto [d, flag] = detect_deviation(a, b, 1.0);
    CHECK(d == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_FALSE(flag);
  }
}

TEST_CASE("zero-noise run reaches the goal without replanning") {
  const PlanningProblem p = youbot_problem(0.0, 0.0);
  ExecutionConfig config;
  config.seed = 5;
  config.goal_probability_samples = 500;
  SolverOptions options;
  options.max_iterations = 60;

  const ExecutionTrace trace = run_tlqg(p, config, options);
  CHECK(trace.status == ExecutionStatus::kGoalReached);
  CHECK(trace.replans == 0);
  CHECK(trace.records.size() <= 10 * 6);
  for (const ExecutionRecord& rec : trace.records) {
    CHECK(rec.kl_distance >= 0.0);
  }
}

TEST_CASE("identical seeds give identical traces") {
  const PlanningProblem p = youbot_problem(1e-5, 1e-5);
  ExecutionConfig config;
  config.seed = 123;
  config.goal_probability_samples = 500;
  SolverOptions options;
  options.max_iterations = 40;

  const ExecutionTrace t1 = run_tlqg(p, config, options);
  const ExecutionTrace t2 = run_tlqg(p, config, options);
  REQUIRE(t1.records.size() == t2.records.size());
  CHECK(t1.status == t2.status);
  for (size_t i = 0; i < t1.records.size(); ++i) {
    CHECK((t1.records[i].true_state - t2.records[i].true_state).norm() == 0.0);
    CHECK((t1.records[i].estimate_mean - t2.records[i].estimate_mean).norm() ==
          0.0);
    CHECK(t1.records[i].kl_distance == t2.records[i].kl_distance);
  }
}

TEST_CASE("a near-zero threshold replans on almost every step") {
  PlanningProblem p = youbot_problem(1e-4, 1e-4);
  p.horizon = 3;
  p.weights = CostWeights::constant(Matrix::Identity(3, 3),
                                    0.01 * Matrix::Identity(4, 4), 3);
  ExecutionConfig config;
  config.seed = 9;
  config.deviation_threshold = 1e-9;
  config.goal_probability_threshold = 0.99;
  config.step_budget = 5;
  config.goal_probability_samples = 200;
  SolverOptions options;
  options.max_iterations = 10;
  options.penalty_rounds = 2;

  const ExecutionTrace trace = run_tlqg(p, config, options);
  CHECK(trace.replans >= static_cast<int>(trace.records.size()) - 1);
}

TEST_CASE("step budget exhausts on an unreachable goal") {
  PlanningProblem p = youbot_problem(1e-6, 1e-6);
  p.goal = test::vec3(50.0, 50.0, 0.0);
  p.control_radius = 0.5;
  ExecutionConfig config;
  config.seed = 2;
  config.step_budget = 4;
  config.goal_probability_samples = 200;
  SolverOptions options;
  options.max_iterations = 10;
  options.penalty_rounds = 2;

  const ExecutionTrace trace = run_tlqg(p, config, options);
  CHECK(trace.status == ExecutionStatus::kStepBudgetExhausted);
  CHECK(trace.records.size() <= 4);
}

TEST_CASE("repeated planner failure aborts the run") {
  PlanningProblem p = youbot_problem(1e-4, 1e-4);
  p.horizon = 3;
  p.weights = CostWeights::constant(Matrix::Identity(3, 3),
                                    0.01 * Matrix::Identity(4, 4), 3);
  ExecutionConfig config;
  config.seed = 4;
  config.deviation_threshold = 1e-12;  // replan on every step
  config.goal_probability_threshold = 0.999;
  config.step_budget = 50;
  config.goal_probability_samples = 100;
  // A solver that cannot settle: one iteration per round, impossible
  // gradient tolerance.
  SolverOptions options;
  options.max_iterations = 1;
  options.penalty_rounds = 1;
  options.convergence_tol = 1e-15;

  const ExecutionTrace trace = run_tlqg(p, config, options);
  CHECK(trace.status == ExecutionStatus::kAbortedPlannerFailure);
  CHECK(trace.planner_warnings >= 3);
  bool saw_warning_record = false;
  for (const ExecutionRecord& rec : trace.records) {
    saw_warning_record = saw_warning_record || rec.planner_warning;
  }
  CHECK(saw_warning_record);
}
