#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tlqg/controller.hpp"
#include "tlqg/rng.hpp"

using namespace tlqg;
using test::mat1;
using test::vec1;

namespace {

NominalTrajectory scalar_traj(int horizon) {
  NominalTrajectory traj;
  traj.states.assign(horizon + 1, vec1(0.0));
  traj.controls.assign(horizon, vec1(0.0));
  return traj;
}

}  // namespace

TEST_CASE("backward riccati scalar hand check") {
  const MotionModel motion = test::linear_motion(mat1(1.0), mat1(1.0), mat1(1.0));
  const CostWeights weights = CostWeights::constant(mat1(1.0), mat1(1.0), 3);
  std::vector<Matrix> values, gains;
  backward_riccati(scalar_traj(3), motion, weights, &values, &gains);

  REQUIRE(values.size() == 4);
  REQUIRE(gains.size() == 3);
  CHECK(values[3](0, 0) == doctest::Approx(1.0));
  // Last-step gain (W^u + B'PB)^-1 B'PA = 1/2; P_{K-1} = 1 - 1/2 + 1 = 3/2.
  CHECK(gains[2](0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(values[2](0, 0) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("backward riccati with no actuation accumulates the state weight") {
  const MotionModel motion = test::linear_motion(mat1(1.0), mat1(0.0), mat1(1.0));
  const int horizon = 4;
  const CostWeights weights =
      CostWeights::constant(mat1(1.0), mat1(1.0), horizon);
  std::vector<Matrix> values, gains;
  backward_riccati(scalar_traj(horizon), motion, weights, &values, &gains);
  for (int t = 0; t < horizon; ++t) {
    CHECK(gains[t](0, 0) == 0.0);
    // P_t = P_{t+1} + 1 with P_K = 1.
    CHECK(values[t](0, 0) == doctest::Approx(horizon - t + 1.0));
  }
}

TEST_CASE("long horizon reaches the DARE fixed point") {
  // Oracle: fixed-point iteration of P = 1 + P - P^2/(1+P); the stationary
  // gain is P/(1+P) = (1+sqrt(5))/2 / (1 + (1+sqrt(5))/2).
  double p = 1.0;
  for (int i = 0; i < 10000; ++i) {
    const double next = 1.0 + p - p * p / (1.0 + p);
    if (std::abs(next - p) < 1e-15) {
      p = next;
      break;
    }
    p = next;
  }
  const double gain_oracle = p / (1.0 + p);
  CHECK(gain_oracle == doctest::Approx(0.6180339887).epsilon(1e-8));

  const MotionModel motion = test::linear_motion(mat1(1.0), mat1(1.0), mat1(1.0));
  const int horizon = 100;
  const CostWeights weights =
      CostWeights::constant(mat1(1.0), mat1(1.0), horizon);
  std::vector<Matrix> values, gains;
  backward_riccati(scalar_traj(horizon), motion, weights, &values, &gains);
  CHECK(std::abs(gains[0](0, 0) - gain_oracle) <= 1e-8);

  // Closed-loop pole inside the unit circle at the fixed point.
  CHECK(std::abs(1.0 - gains[0](0, 0)) < 1.0);
}

TEST_CASE("value matrices stay symmetric") {
  CounterRng rng(12);
  Matrix a(2, 2), b(2, 1);
  a << 1.1, 0.2, -0.3, 0.9;
  b << 0.5, 1.0;
  const MotionModel motion =
      test::linear_motion(a, b, Matrix::Identity(2, 2));
  const CostWeights weights = CostWeights::constant(
      Matrix::Identity(2, 2), mat1(0.5), 30);
  NominalTrajectory traj;
  traj.states.assign(31, Vector::Zero(2));
  traj.controls.assign(30, Vector::Zero(1));
  std::vector<Matrix> values, gains;
  backward_riccati(traj, motion, weights, &values, &gains);
  for (const Matrix& v : values) {
    CHECK((v - v.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("PSD-only control weight is rejected") {
  const MotionModel motion = test::linear_motion(mat1(1.0), mat1(1.0), mat1(1.0));
  const CostWeights weights = CostWeights::constant(mat1(1.0), mat1(0.0), 2);
  std::vector<Matrix> values, gains;
  CHECK_THROWS_AS(
      backward_riccati(scalar_traj(2), motion, weights, &values, &gains),
      NumericalError);
}

TEST_CASE("control action") {
  LqgPolicy policy;
  policy.nominal.states = {vec1(1.0), vec1(2.0)};
  policy.nominal.controls = {vec1(1.0)};
  policy.gains = {mat1(0.5)};

  SUBCASE("zero tracking error returns the nominal control") {
    CHECK(control_action(policy, 0, vec1(1.0))[0] == doctest::Approx(1.0));
  }
  SUBCASE("zero gain is open loop") {
    policy.gains[0] = mat1(0.0);
    CHECK(control_action(policy, 0, vec1(42.0))[0] == doctest::Approx(1.0));
  }
  SUBCASE("scalar plug-in cancels the nominal control") {
    CHECK(control_action(policy, 0, vec1(3.0))[0] ==
          doctest::Approx(0.0));  // 1 - 0.5 * 2
  }
  SUBCASE("time index out of range") {
    CHECK_THROWS_AS(control_action(policy, 1, vec1(0.0)), std::out_of_range);
    CHECK_THROWS_AS(control_action(policy, -1, vec1(0.0)), std::out_of_range);
  }
}

TEST_CASE("gains depend only on the trajectory and weights") {
  const MotionModel motion = test::linear_motion(mat1(0.9), mat1(1.0), mat1(1.0));
  const ObservationModel obs = test::linear_observation(mat1(1.0), mat1(1.0));
  const CostWeights weights = CostWeights::constant(mat1(1.0), mat1(0.2), 5);
  const NominalTrajectory traj = scalar_traj(5);

  const NoiseSpec quiet{mat1(1e-6), mat1(1e-6)};
  const NoiseSpec loud{mat1(10.0), mat1(10.0)};
  const LqgPolicy p1 =
      make_lqg_policy(traj, motion, obs, quiet, weights, mat1(0.1));
  const LqgPolicy p2 =
      make_lqg_policy(traj, motion, obs, loud, weights, mat1(5.0));
  for (int t = 0; t < 5; ++t) {
    CHECK(p1.gains[t](0, 0) == p2.gains[t](0, 0));
  }
  // The execution-filter quantities do depend on the noise.
  CHECK(p1.kalman_gains[0](0, 0) != p2.kalman_gains[0](0, 0));
  CHECK(p1.nominal_covariances.size() == 6);
  CHECK(p1.value_matrices[5](0, 0) == doctest::Approx(1.0));
}
