#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "tlqg/io.hpp"
#include "tlqg/rng.hpp"
#include "tlqg/scenario.hpp"

using namespace tlqg;

namespace {

std::string tmp_path(const std::string& name) {
  return std::string("tlqg_test_") + name;
}

std::string minimal_scenario_json() {
  return R"({
    "name": "mini",
    "motion": {"type": "youbot", "dt": 1.0},
    "observation": {"kind": "range_bearing", "landmarks": [[2.0, 2.0]]},
    "noise": {"sigma_omega": 1e-4, "sigma_nu": 1e-4},
    "initial_belief": {"mean": [0, 0, 0], "covariance": 1e-4},
    "goal": {"state": [1, 1, 0.5], "radius": 0.1},
    "horizon": 5,
    "weights": {"state": 1.0, "control": 0.01},
    "control_bound": 10.0,
    "seed": 3
  })";
}

}  // namespace

TEST_CASE("double formatting round-trips bit-exactly") {
  CounterRng rng(202);
  for (int i = 0; i < 200; ++i) {
    const double v = rng.normal() * std::pow(10.0, int(rng.uniform() * 20) - 10);
    const double back = parse_double(format_double(v));
    CHECK(back == v);
  }
  CHECK(parse_double(format_double(0.0)) == 0.0);
  CHECK_THROWS_AS(parse_double("not-a-number"), ConfigError);
}

TEST_CASE("plan file round-trips the optimized trajectory") {
  PlanResult result;
  CounterRng rng(7);
  const int horizon = 4;
  for (int t = 0; t <= horizon; ++t) {
    result.trajectory.states.push_back(rng.normal_vector(3));
  }
  for (int t = 0; t < horizon; ++t) {
    result.trajectory.controls.push_back(rng.normal_vector(4));
    result.covariance_traces.push_back(rng.uniform());
  }
  result.cost = 1.25;
  result.converged = true;

  NominalTrajectory seed = result.trajectory;

  const std::string path = tmp_path("plan.csv");
  write_plan_file(path, "roundtrip", result, seed, {});
  const NominalTrajectory back = read_plan_trajectory(path);
  REQUIRE(back.states.size() == result.trajectory.states.size());
  REQUIRE(back.controls.size() == result.trajectory.controls.size());
  for (size_t t = 0; t < back.states.size(); ++t) {
    CHECK((back.states[t] - result.trajectory.states[t]).norm() == 0.0);
  }
  for (size_t t = 0; t < back.controls.size(); ++t) {
    CHECK((back.controls[t] - result.trajectory.controls[t]).norm() == 0.0);
  }
  std::remove(path.c_str());
}

TEST_CASE("trace file carries the metadata preamble") {
  ExecutionTrace trace;
  trace.seed = 12;
  trace.status = ExecutionStatus::kGoalReached;
  ExecutionRecord rec;
  rec.step = 1;
  rec.plan_time = 1;
  rec.true_state = test::vec3(0.1, 0.2, 0.3);
  rec.estimate_mean = test::vec3(0.1, 0.2, 0.3);
  rec.control = Vector::Zero(4);
  rec.observation = Vector::Zero(2);
  trace.records.push_back(rec);

  const std::string path = tmp_path("trace.csv");
  write_trace_file(path, "mini", trace);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# tlqg trace v1");
  bool saw_status = false;
  while (std::getline(in, line) && !line.empty() && line[0] == '#') {
    if (line == "# status=goal_reached") {
      saw_status = true;
    }
  }
  CHECK(saw_status);
  CHECK(line.rfind("step,plan_time,", 0) == 0);
  std::remove(path.c_str());
}

TEST_CASE("scenario parsing") {
  SUBCASE("minimal scenario loads") {
    const Scenario s = parse_scenario(minimal_scenario_json(), "test");
    CHECK(s.name == "mini");
    CHECK(s.horizon == 5);
    CHECK(s.obs_kind == ObservationKind::kRangeBearing);
    const PlanningProblem p = build_problem(s);
    CHECK(p.motion.state_dim == 3);
    CHECK(p.obs.obs_dim == 2);
    CHECK(p.weights.horizon() == 5);
  }
  SUBCASE("missing goal is named in the error") {
    std::string text = minimal_scenario_json();
    const auto pos = text.find("\"goal\"");
    text.replace(pos, 6, "\"gol\"");
    try {
      parse_scenario(text, "test");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("goal") != std::string::npos);
    }
  }
  SUBCASE("dimension mismatch is rejected") {
    std::string text = minimal_scenario_json();
    const auto pos = text.find("[0, 0, 0]");
    text.replace(pos, 9, "[0, 0]");
    CHECK_THROWS_AS(parse_scenario(text, "test"), ConfigError);
  }
  SUBCASE("malformed json is rejected") {
    CHECK_THROWS_AS(parse_scenario("{not json", "test"), ConfigError);
  }
  SUBCASE("unknown observation kind is rejected") {
    std::string text = minimal_scenario_json();
    const auto pos = text.find("range_bearing");
    text.replace(pos, 13, "telepathy");
    CHECK_THROWS_AS(parse_scenario(text, "test"), ConfigError);
  }
}

TEST_CASE("polygon vertex file parsing") {
  const std::string path = tmp_path("verts.csv");
  {
    std::ofstream out(path);
    out << "# square then triangle\n";
    out << "0,0\n1,0\n1,1\n0,1\n\n";
    out << "2,2\n3,2\n2.5,3\n";
  }
  const auto polys = read_polygon_file(path);
  REQUIRE(polys.size() == 2);
  CHECK(polys[0].size() == 4);
  CHECK(polys[1].size() == 3);
  CHECK(polys[1][2][0] == doctest::Approx(2.5));
  std::remove(path.c_str());

  const std::string bad = tmp_path("badverts.csv");
  {
    std::ofstream out(bad);
    out << "1,2,3\n";
  }
  CHECK_THROWS_AS(read_polygon_file(bad), ConfigError);
  std::remove(bad.c_str());
}

TEST_CASE("indefinite noise covariance is rejected") {
  std::string text = minimal_scenario_json();
  const auto pos = text.find("\"sigma_omega\": 1e-4");
  text.replace(pos, 19,
               "\"sigma_omega\": [[1,0,0],[0,-1,0],[0,0,1]]");
  CHECK_THROWS_AS(parse_scenario(text, "test"), ConfigError);
}
