#include "tlqg/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tlqg {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("scenario field '" + field + "': " + what);
}

double get_number(const json& j, const std::string& field, double fallback,
                  bool required = false) {
  if (!j.contains(field)) {
    if (required) {
      fail(field, "missing");
    }
    return fallback;
  }
  if (!j[field].is_number()) {
    fail(field, "expected a number");
  }
  return j[field].get<double>();
}

Vector get_vector(const json& j, const std::string& field) {
  if (!j.contains(field) || !j[field].is_array()) {
    fail(field, "expected an array of numbers");
  }
  const auto& arr = j[field];
  Vector v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) {
      fail(field, "expected an array of numbers");
    }
    v[static_cast<int>(i)] = arr[i].get<double>();
  }
  return v;
}

// A scalar s means s * I(n); a nested array is read as a full matrix.
Matrix get_scaled_matrix(const json& j, const std::string& field, int n,
                         double fallback) {
  if (!j.contains(field)) {
    return fallback * Matrix::Identity(n, n);
  }
  const auto& val = j[field];
  if (val.is_number()) {
    return val.get<double>() * Matrix::Identity(n, n);
  }
  if (val.is_array() && !val.empty() && val[0].is_array()) {
    const int rows = static_cast<int>(val.size());
    const int cols = static_cast<int>(val[0].size());
    if (rows != n || cols != n) {
      fail(field, "expected a " + std::to_string(n) + "x" + std::to_string(n) +
                      " matrix");
    }
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      if (!val[r].is_array() || static_cast<int>(val[r].size()) != cols) {
        fail(field, "ragged matrix");
      }
      for (int c = 0; c < cols; ++c) {
        m(r, c) = val[r][c].get<double>();
      }
    }
    return m;
  }
  fail(field, "expected a scalar or a matrix");
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const std::string& where) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(where + ": " + e.what());
  }

  Scenario s;
  s.name = root.value("name", "scenario");

  if (!root.contains("motion") || !root["motion"].is_object()) {
    fail("motion", "missing object");
  }
  const json& motion = root["motion"];
  const std::string motion_type = motion.value("type", "youbot");
  if (motion_type != "youbot") {
    fail("motion.type", "unsupported motion model '" + motion_type + "'");
  }
  s.dt = get_number(motion, "dt", 1.0);
  if (s.dt <= 0.0) {
    fail("motion.dt", "must be positive");
  }
  s.geometry.wheel_radius = get_number(motion, "wheel_radius", 0.05);
  s.geometry.half_length = get_number(motion, "half_length", 0.235);
  s.geometry.half_width = get_number(motion, "half_width", 0.15);

  if (!root.contains("observation") || !root["observation"].is_object()) {
    fail("observation", "missing object");
  }
  const json& obs = root["observation"];
  if (!obs.contains("kind") || !obs["kind"].is_string()) {
    fail("observation.kind", "missing string");
  }
  s.obs_kind = observation_kind_from_string(obs["kind"].get<std::string>());
  if (obs.contains("landmarks")) {
    for (const auto& lm : obs["landmarks"]) {
      if (!lm.is_array() || lm.size() != 2) {
        fail("observation.landmarks", "each landmark must be [x, y]");
      }
      s.landmarks.landmarks.emplace_back(lm[0].get<double>(),
                                         lm[1].get<double>());
    }
  }
  s.obs_params = default_observation_params(s.obs_kind);
  s.obs_params.a = get_number(obs, "a", s.obs_params.a);
  s.obs_params.b = get_number(obs, "b", s.obs_params.b);
  s.obs_params.c = get_number(obs, "c", s.obs_params.c);

  // Model dimensions are fixed by the youbot base + observation kind.
  MotionModel motion_model = youbot_motion(s.geometry, s.dt);
  ObservationModel obs_model =
      make_observation_model(s.obs_kind, s.landmarks, s.obs_params);

  const auto check_psd = [](const Matrix& m, const std::string& field) {
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
      fail(field, "must be symmetric");
    }
    if (min_eigenvalue(m) < -1e-12) {
      fail(field, "must be positive semidefinite");
    }
  };

  const json noise = root.value("noise", json::object());
  s.sigma_omega =
      get_scaled_matrix(noise, "sigma_omega", motion_model.noise_dim, 1e-4);
  s.sigma_nu = get_scaled_matrix(noise, "sigma_nu", obs_model.noise_dim, 1e-4);
  check_psd(s.sigma_omega, "noise.sigma_omega");
  check_psd(s.sigma_nu, "noise.sigma_nu");

  if (!root.contains("initial_belief") || !root["initial_belief"].is_object()) {
    fail("initial_belief", "missing object");
  }
  s.x0_mean = get_vector(root["initial_belief"], "mean");
  if (s.x0_mean.size() != motion_model.state_dim) {
    fail("initial_belief.mean", "dimension must match the state");
  }
  s.p0 = get_scaled_matrix(root["initial_belief"], "covariance",
                           motion_model.state_dim, 1e-4);
  check_psd(s.p0, "initial_belief.covariance");

  if (!root.contains("goal") || !root["goal"].is_object()) {
    fail("goal", "missing object");
  }
  s.goal = get_vector(root["goal"], "state");
  if (s.goal.size() != motion_model.state_dim) {
    fail("goal.state", "dimension must match the state");
  }
  s.goal_radius = get_number(root["goal"], "radius", 0.1);
  if (s.goal_radius <= 0.0) {
    fail("goal.radius", "must be positive");
  }
  s.goal_margin = get_number(root["goal"], "planning_margin", 0.05);
  if (s.goal_margin < 0.0 || s.goal_margin >= 1.0) {
    fail("goal.planning_margin", "must be in [0, 1)");
  }

  const double horizon = get_number(root, "horizon", 0.0, true);
  if (horizon < 1.0 || horizon != std::floor(horizon)) {
    fail("horizon", "must be a positive integer");
  }
  s.horizon = static_cast<int>(horizon);

  const json weights = root.value("weights", json::object());
  s.wx = get_scaled_matrix(weights, "state", motion_model.state_dim, 1.0);
  s.wu = get_scaled_matrix(weights, "control", motion_model.control_dim, 0.01);
  check_psd(s.wx, "weights.state");
  check_psd(s.wu, "weights.control");

  s.control_radius = get_number(root, "control_bound", 1.0);
  if (s.control_radius <= 0.0) {
    fail("control_bound", "must be positive");
  }

  if (root.contains("obstacles")) {
    const json& obst = root["obstacles"];
    ObstacleConfig cfg;
    if (!obst.contains("polygons") || !obst["polygons"].is_array()) {
      fail("obstacles.polygons", "expected an array of polygons");
    }
    for (const auto& poly : obst["polygons"]) {
      std::vector<Vector> vertices;
      for (const auto& v : poly) {
        if (!v.is_array() || v.size() != 2) {
          fail("obstacles.polygons", "each vertex must be [x, y]");
        }
        Vector p(2);
        p << v[0].get<double>(), v[1].get<double>();
        vertices.push_back(p);
      }
      if (vertices.size() < 3) {
        fail("obstacles.polygons", "each polygon needs at least 3 vertices");
      }
      cfg.polygons.push_back(std::move(vertices));
    }
    cfg.inflation_radius = get_number(obst, "inflation_radius", 0.0);
    cfg.m1 = get_number(obst, "m1", 10.0);
    cfg.m2 = get_number(obst, "m2", 0.1);
    cfg.q = static_cast<int>(get_number(obst, "q", 2.0));
    cfg.axis_samples = static_cast<int>(get_number(obst, "axis_samples", 10.0));
    cfg.riemann_points =
        static_cast<int>(get_number(obst, "riemann_points", 5.0));
    cfg.weight = get_number(obst, "weight", 1.0);
    cfg.mvee_tolerance = get_number(obst, "mvee_tolerance", 1e-7);
    if (cfg.q < 1 || cfg.axis_samples < 1 || cfg.riemann_points < 1) {
      fail("obstacles", "q, axis_samples and riemann_points must be >= 1");
    }
    s.obstacles = std::move(cfg);
  }

  if (root.contains("seed_waypoints")) {
    for (const auto& w : root["seed_waypoints"]) {
      if (!w.is_array() ||
          static_cast<int>(w.size()) != motion_model.state_dim) {
        fail("seed_waypoints", "each waypoint must be a full state vector");
      }
      Vector p(motion_model.state_dim);
      for (int i = 0; i < motion_model.state_dim; ++i) {
        p[i] = w[i].get<double>();
      }
      s.seed_waypoints.push_back(std::move(p));
    }
  }

  const json solver = root.value("solver", json::object());
  const SolverOptions solver_defaults;
  s.solver.max_iterations = static_cast<int>(get_number(
      solver, "max_iterations", solver_defaults.max_iterations));
  s.solver.gradient_step =
      get_number(solver, "gradient_step", solver_defaults.gradient_step);
  s.solver.penalty_initial =
      get_number(solver, "penalty_initial", solver_defaults.penalty_initial);
  s.solver.penalty_growth =
      get_number(solver, "penalty_growth", solver_defaults.penalty_growth);
  s.solver.penalty_rounds = static_cast<int>(
      get_number(solver, "penalty_rounds", solver_defaults.penalty_rounds));
  s.solver.convergence_tol =
      get_number(solver, "convergence_tol", solver_defaults.convergence_tol);
  if (s.solver.max_iterations < 1 || s.solver.gradient_step <= 0.0 ||
      s.solver.penalty_initial <= 0.0 || s.solver.penalty_growth <= 1.0 ||
      s.solver.penalty_rounds < 1 || s.solver.convergence_tol <= 0.0) {
    fail("solver", "options must be positive (and penalty_growth > 1)");
  }

  const json exec = root.value("execution", json::object());
  const ExecutionConfig exec_defaults;
  s.execution.deviation_threshold = get_number(
      exec, "deviation_threshold", exec_defaults.deviation_threshold);
  s.execution.goal_probability_threshold =
      get_number(exec, "goal_probability_threshold",
                 exec_defaults.goal_probability_threshold);
  s.execution.step_budget = static_cast<int>(
      get_number(exec, "step_budget", exec_defaults.step_budget));
  s.execution.goal_probability_samples =
      static_cast<int>(get_number(exec, "goal_probability_samples",
                                  exec_defaults.goal_probability_samples));
  if (s.execution.deviation_threshold <= 0.0) {
    fail("execution.deviation_threshold", "must be positive");
  }
  if (s.execution.goal_probability_threshold <= 0.0 ||
      s.execution.goal_probability_threshold >= 1.0) {
    fail("execution.goal_probability_threshold", "must be in (0, 1)");
  }

  const double seed = get_number(root, "seed", 0.0);
  s.seed = static_cast<std::uint64_t>(seed);
  s.execution.seed = s.seed;
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open scenario file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path);
}

std::vector<Vector> scenario_seed(const Scenario& scenario,
                                  const PlanningProblem& problem) {
  return scenario.seed_waypoints.empty()
             ? straight_line_seed(problem)
             : waypoint_seed(problem, scenario.seed_waypoints);
}

PlanningProblem build_problem(const Scenario& scenario) {
  PlanningProblem problem;
  problem.motion = youbot_motion(scenario.geometry, scenario.dt);
  problem.obs = make_observation_model(scenario.obs_kind, scenario.landmarks,
                                       scenario.obs_params);
  problem.noise.sigma_omega = scenario.sigma_omega;
  problem.noise.sigma_nu = scenario.sigma_nu;
  problem.x0_mean = scenario.x0_mean;
  problem.p0 = scenario.p0;
  problem.weights =
      CostWeights::constant(scenario.wx, scenario.wu, scenario.horizon);
  problem.goal = scenario.goal;
  problem.goal_radius = scenario.goal_radius;
  problem.goal_margin = scenario.goal_margin;
  problem.control_radius = scenario.control_radius;
  problem.horizon = scenario.horizon;
  if (scenario.obstacles) {
    const ObstacleConfig& cfg = *scenario.obstacles;
    ObstacleSet set;
    set.m1 = cfg.m1;
    set.m2 = cfg.m2;
    set.q = cfg.q;
    set.axis_samples = cfg.axis_samples;
    set.riemann_points = cfg.riemann_points;
    for (const auto& poly : cfg.polygons) {
      set.ellipsoids.push_back(
          mvee(inflate_polygon(poly, cfg.inflation_radius), cfg.mvee_tolerance));
    }
    problem.obstacles = std::move(set);
    problem.obstacle_weight = cfg.weight;
  }
  return problem;
}

}  // namespace tlqg
