#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "tlqg/io.hpp"
#include "tlqg/scenario.hpp"
#include "tlqg/svg.hpp"
#include "tlqg/validation.hpp"

namespace {

// Exit codes: 0 success, 1 validation failure, 2 input error,
// 3 solver non-convergence.
constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitNoConvergence = 3;

int log_level() {
  const char* env = std::getenv("TLQG_LOG");
  return env == nullptr ? 0 : std::atoi(env);
}

void info(const std::string& msg) {
  if (log_level() >= 1) {
    std::cerr << "[tlqg] " << msg << '\n';
  }
}

std::vector<tlqg::Ellipsoid> scenario_ellipsoids(const tlqg::Scenario& s) {
  std::vector<tlqg::Ellipsoid> out;
  if (!s.obstacles) {
    return out;
  }
  for (const auto& poly : s.obstacles->polygons) {
    out.push_back(
        tlqg::mvee(tlqg::inflate_polygon(poly, s.obstacles->inflation_radius),
                   s.obstacles->mvee_tolerance));
  }
  return out;
}

tlqg::SvgScene scene_for(const tlqg::Scenario& scenario,
                         const tlqg::NominalTrajectory& seed,
                         const tlqg::NominalTrajectory& optimized) {
  tlqg::SvgScene scene;
  if (scenario.obstacles) {
    scene.polygons = scenario.obstacles->polygons;
    scene.ellipsoids = scenario_ellipsoids(scenario);
  }
  scene.landmarks = scenario.landmarks.landmarks;
  scene.goal = scenario.goal;
  scene.goal_radius = scenario.goal_radius;
  scene.seed = seed;
  scene.optimized = optimized;
  return scene;
}

int cmd_plan(const std::string& scenario_path, const std::string& out_path,
             const std::string& svg_path) {
  const tlqg::Scenario scenario = tlqg::load_scenario(scenario_path);
  const tlqg::PlanningProblem problem = tlqg::build_problem(scenario);
  const std::vector<tlqg::Vector> seed = tlqg::scenario_seed(scenario, problem);
  const tlqg::NominalTrajectory seed_traj =
      tlqg::propagate_nominal(problem.x0_mean, seed, problem.motion);

  info("planning '" + scenario.name +
       "' (K=" + std::to_string(problem.horizon) + ")");
  const tlqg::PlanResult result = tlqg::solve(problem, seed, scenario.solver);
  tlqg::write_plan_file(out_path, scenario.name, result, seed_traj,
                        problem.obstacles ? problem.obstacles->ellipsoids
                                          : std::vector<tlqg::Ellipsoid>{});
  if (!svg_path.empty()) {
    tlqg::SvgScene scene = scene_for(scenario, seed_traj, result.trajectory);
    scene.covariances.push_back(problem.p0);
    for (const auto& step : tlqg::propagate_nominal_covariance(
             result.trajectory, problem.motion, problem.obs, problem.noise,
             problem.p0)) {
      scene.covariances.push_back(step.p_plus);
    }
    tlqg::write_svg(svg_path, scene);
  }
  std::cout << "plan: cost " << tlqg::format_double(result.cost) << " (seed "
            << tlqg::format_double(result.seed_cost) << "), violation "
            << tlqg::format_double(result.constraint_violation)
            << (result.converged ? ", converged" : ", NOT converged") << '\n';
  return result.converged ? kExitOk : kExitNoConvergence;
}

int cmd_execute(const std::string& scenario_path, const std::string& plan_path,
                const std::string& out_path, const std::string& svg_path,
                std::uint64_t seed_override, bool seed_given, int batch) {
  tlqg::Scenario scenario = tlqg::load_scenario(scenario_path);
  if (seed_given) {
    scenario.seed = seed_override;
    scenario.execution.seed = seed_override;
  }
  const tlqg::PlanningProblem problem = tlqg::build_problem(scenario);

  tlqg::NominalTrajectory initial_plan;
  const tlqg::NominalTrajectory* initial = nullptr;
  if (!plan_path.empty()) {
    initial_plan = tlqg::read_plan_trajectory(plan_path);
    initial = &initial_plan;
  }

  if (batch <= 1) {
    const tlqg::ExecutionTrace trace =
        tlqg::run_tlqg(problem, scenario.execution, scenario.solver, initial);
    tlqg::write_trace_file(out_path, scenario.name, trace);
    if (!svg_path.empty()) {
      tlqg::NominalTrajectory executed;
      for (const auto& rec : trace.records) {
        executed.states.push_back(rec.true_state);
      }
      tlqg::write_svg(svg_path, scene_for(scenario, {}, executed));
    }
    std::cout << "execute: status " << tlqg::to_string(trace.status)
              << ", steps " << trace.records.size() << ", replans "
              << trace.replans << '\n';
    return trace.status == tlqg::ExecutionStatus::kGoalReached
               ? kExitOk
               : kExitValidationFailure;
  }

  // Batch mode: one trace file per seed plus a summary row.
  const std::filesystem::path base(out_path);
  const std::string stem = (base.parent_path() / base.stem()).string();
  const std::string ext =
      base.extension().empty() ? ".csv" : base.extension().string();
  int reached = 0;
  std::ofstream summary(stem + "_summary.csv");
  if (!summary) {
    throw tlqg::ConfigError("cannot open output file: " + stem +
                            "_summary.csv");
  }
  summary << "seed,status,steps,replans,goal_probability\n";
  for (int k = 0; k < batch; ++k) {
    tlqg::ExecutionConfig config = scenario.execution;
    config.seed = scenario.seed + static_cast<std::uint64_t>(k);
    const tlqg::ExecutionTrace trace =
        tlqg::run_tlqg(problem, config, scenario.solver, initial);
    tlqg::write_trace_file(stem + "_seed" + std::to_string(config.seed) + ext,
                           scenario.name, trace);
    summary << config.seed << ',' << tlqg::to_string(trace.status) << ','
            << trace.records.size() << ',' << trace.replans << ','
            << tlqg::format_double(trace.final_goal_probability) << '\n';
    if (trace.status == tlqg::ExecutionStatus::kGoalReached) {
      ++reached;
    }
  }
  summary << "# reach_rate=" << reached << '/' << batch << '\n';
  std::cout << "execute batch: " << reached << '/' << batch
            << " runs reached the goal\n";
  return kExitOk;
}

int cmd_validate(std::uint64_t seed, int systems, int realizations,
                 int samples, bool inject_gain_error) {
  tlqg::ValidationOptions options;
  options.seed = seed;
  options.systems = systems;
  options.realizations = realizations;
  options.theorem1_samples = samples;
  options.inject_gain_error = inject_gain_error;
  const tlqg::ValidationReport report = tlqg::run_validation(options);
  std::cout << report.summary();
  return report.passed ? kExitOk : kExitValidationFailure;
}

int cmd_mvee(const std::string& vertex_path, double radius,
             const std::string& out_path) {
  const auto polygons = tlqg::read_polygon_file(vertex_path);
  if (polygons.empty()) {
    throw tlqg::ConfigError("vertex file has no polygons: " + vertex_path);
  }
  std::vector<tlqg::Ellipsoid> ellipsoids;
  for (const auto& poly : polygons) {
    if (poly.size() < 3) {
      throw tlqg::ConfigError("polygon needs at least 3 vertices");
    }
    ellipsoids.push_back(tlqg::mvee(tlqg::inflate_polygon(poly, radius)));
  }
  tlqg::write_mvee_file(out_path, ellipsoids);
  std::cout << "mvee: " << ellipsoids.size() << " ellipsoid(s) written\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Belief-space motion planning via trajectory-optimized LQG"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, svg_path, plan_path, vertex_path;
  std::uint64_t seed = 1;
  bool seed_given = false;
  int batch = 1;
  double radius = 0.0;
  int systems = 100, realizations = 100, samples = 100000;
  bool inject = false;

  CLI::App* plan = app.add_subcommand("plan", "optimize a trajectory");
  plan->add_option("--scenario", scenario_path, "scenario JSON file")
      ->required();
  plan->add_option("--out", out_path, "plan output file")->required();
  plan->add_option("--svg", svg_path, "optional SVG plot");

  CLI::App* execute = app.add_subcommand("execute", "run the control loop");
  execute->add_option("--scenario", scenario_path, "scenario JSON file")
      ->required();
  execute->add_option("--out", out_path, "trace output file")->required();
  execute->add_option("--plan", plan_path, "reuse a plan file");
  execute->add_option("--svg", svg_path, "optional SVG plot");
  execute->add_option("--seeds", batch, "number of seeded runs");
  execute->add_option("--seed", seed, "override the scenario seed")
      ->each([&seed_given](const std::string&) { seed_given = true; });

  CLI::App* validate =
      app.add_subcommand("validate", "check the error-propagation identities");
  validate->add_option("--seed", seed, "random seed");
  validate->add_option("--systems", systems, "number of random systems");
  validate->add_option("--realizations", realizations,
                       "realizations per system");
  validate->add_option("--theorem1-samples", samples,
                       "Monte-Carlo samples for the cost-error check");
  validate->add_flag("--inject-gain-error", inject,
                     "negative control: perturb a gain and expect failure");

  CLI::App* mvee_cmd =
      app.add_subcommand("mvee", "enclosing ellipsoids of polygons");
  mvee_cmd->add_option("--vertices", vertex_path, "polygon vertex file")
      ->required();
  mvee_cmd->add_option("--radius", radius, "inflation radius");
  mvee_cmd->add_option("--out", out_path, "ellipsoid output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*plan) {
      return cmd_plan(scenario_path, out_path, svg_path);
    }
    if (*execute) {
      return cmd_execute(scenario_path, plan_path, out_path, svg_path, seed,
                         seed_given, batch);
    }
    if (*validate) {
      return cmd_validate(seed, systems, realizations, samples, inject);
    }
    if (*mvee_cmd) {
      return cmd_mvee(vertex_path, radius, out_path);
    }
  } catch (const tlqg::ConfigError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidationFailure;
  }
  return kExitInputError;
}
