#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tlqg/executor.hpp"
#include "tlqg/planner.hpp"

namespace tlqg {

struct ObstacleConfig {
  std::vector<std::vector<Vector>> polygons;
  double inflation_radius = 0.0;
  double m1 = 10.0;
  double m2 = 0.1;
  int q = 2;
  int axis_samples = 10;
  int riemann_points = 5;
  double weight = 1.0;
  double mvee_tolerance = 1e-7;
};

// Declarative problem description read from a JSON document. Validated on
// load; dimension mismatches and malformed fields raise ConfigError with the
// offending field named.
struct Scenario {
  std::string name;

  YoubotGeometry geometry;
  double dt = 1.0;

  ObservationKind obs_kind = ObservationKind::kRangeBearing;
  LandmarkMap landmarks;
  ObservationParams obs_params;

  Matrix sigma_omega;
  Matrix sigma_nu;

  Vector x0_mean;
  Matrix p0;
  Vector goal;
  double goal_radius = 0.1;
  double goal_margin = 0.05;
  double control_radius = 1.0;
  int horizon = 1;
  Matrix wx;
  Matrix wu;

  std::optional<ObstacleConfig> obstacles;
  std::vector<Vector> seed_waypoints;  // optional coarse path for the seed

  SolverOptions solver;
  ExecutionConfig execution;
  std::uint64_t seed = 0;
};

// The scenario's seed controls: straight line unless waypoints are given.
std::vector<Vector> scenario_seed(const Scenario& scenario,
                                  const PlanningProblem& problem);

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text, const std::string& where);

// Assembles models, noise, weights and obstacles into a planner problem.
PlanningProblem build_problem(const Scenario& scenario);

}  // namespace tlqg
