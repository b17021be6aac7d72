#include "tlqg/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace tlqg {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin != end && *begin == ' ') {
    ++begin;
  }
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc()) {
    throw ConfigError("malformed number: '" + text + "'");
  }
  return v;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, sep)) {
    out.push_back(field);
  }
  if (!line.empty() && line.back() == sep) {
    out.emplace_back();
  }
  return out;
}

void write_row(std::ofstream& out, const std::string& section, int t,
               const Vector& values, int width) {
  out << section << ',' << t;
  for (int i = 0; i < width; ++i) {
    out << ',';
    if (i < values.size()) {
      out << format_double(values[i]);
    }
  }
  out << '\n';
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot open output file: " + path);
  }
  return out;
}

}  // namespace

void write_plan_file(const std::string& path, const std::string& scenario_name,
                     const PlanResult& result,
                     const NominalTrajectory& seed_trajectory,
                     const std::vector<Ellipsoid>& ellipsoids) {
  std::ofstream out = open_out(path);
  const int nx = result.trajectory.states.empty()
                     ? 0
                     : static_cast<int>(result.trajectory.states[0].size());
  const int nu = result.trajectory.controls.empty()
                     ? 0
                     : static_cast<int>(result.trajectory.controls[0].size());
  const int width = std::max({nx, nu, 5});

  out << "# tlqg plan v1\n";
  out << "# scenario=" << scenario_name << '\n';
  out << "# horizon=" << result.trajectory.horizon() << '\n';
  out << "# state_dim=" << nx << '\n';
  out << "# control_dim=" << nu << '\n';
  out << "# cost=" << format_double(result.cost) << '\n';
  out << "# estimation_cost=" << format_double(result.estimation_cost) << '\n';
  out << "# control_cost=" << format_double(result.control_cost) << '\n';
  out << "# obstacle_cost=" << format_double(result.obstacle_cost_total) << '\n';
  out << "# seed_cost=" << format_double(result.seed_cost) << '\n';
  out << "# iterations=" << result.iterations << '\n';
  out << "# converged=" << (result.converged ? 1 : 0) << '\n';
  out << "# constraint_violation=" << format_double(result.constraint_violation)
      << '\n';

  out << "section,t";
  for (int i = 0; i < width; ++i) {
    out << ",v" << i;
  }
  out << '\n';

  for (size_t t = 0; t < seed_trajectory.states.size(); ++t) {
    write_row(out, "seed_state", static_cast<int>(t), seed_trajectory.states[t],
              width);
  }
  for (size_t t = 0; t < seed_trajectory.controls.size(); ++t) {
    write_row(out, "seed_control", static_cast<int>(t),
              seed_trajectory.controls[t], width);
  }
  for (size_t t = 0; t < result.trajectory.states.size(); ++t) {
    write_row(out, "opt_state", static_cast<int>(t), result.trajectory.states[t],
              width);
  }
  for (size_t t = 0; t < result.trajectory.controls.size(); ++t) {
    write_row(out, "opt_control", static_cast<int>(t),
              result.trajectory.controls[t], width);
  }
  for (size_t i = 0; i < result.covariance_traces.size(); ++i) {
    Vector v(1);
    v << result.covariance_traces[i];
    write_row(out, "cov_trace", static_cast<int>(i) + 1, v, width);
  }
  for (size_t i = 0; i < ellipsoids.size(); ++i) {
    Vector v(5);
    v << ellipsoids[i].center[0], ellipsoids[i].center[1],
        ellipsoids[i].shape(0, 0), ellipsoids[i].shape(0, 1),
        ellipsoids[i].shape(1, 1);
    write_row(out, "ellipsoid", static_cast<int>(i), v, width);
  }
}

NominalTrajectory read_plan_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open plan file: " + path);
  }
  NominalTrajectory traj;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    const std::vector<std::string> fields = split(line, ',');
    if (fields.size() < 3) {
      throw ConfigError("malformed plan row: '" + line + "'");
    }
    if (fields[0] != "opt_state" && fields[0] != "opt_control") {
      continue;
    }
    std::vector<double> values;
    for (size_t i = 2; i < fields.size(); ++i) {
      if (fields[i].empty()) {
        break;
      }
      values.push_back(parse_double(fields[i]));
    }
    Vector v(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
      v[static_cast<int>(i)] = values[i];
    }
    if (fields[0] == "opt_state") {
      traj.states.push_back(std::move(v));
    } else {
      traj.controls.push_back(std::move(v));
    }
  }
  if (traj.states.size() != traj.controls.size() + 1 || traj.states.empty()) {
    throw ConfigError("plan file has an inconsistent trajectory: " + path);
  }
  return traj;
}

void write_trace_file(const std::string& path, const std::string& scenario_name,
                      const ExecutionTrace& trace) {
  std::ofstream out = open_out(path);
  out << "# tlqg trace v1\n";
  out << "# scenario=" << scenario_name << '\n';
  out << "# seed=" << trace.seed << '\n';
  out << "# status=" << to_string(trace.status) << '\n';
  out << "# replans=" << trace.replans << '\n';
  out << "# planner_warnings=" << trace.planner_warnings << '\n';
  out << "# final_goal_probability="
      << format_double(trace.final_goal_probability) << '\n';
  out << "# records=" << trace.records.size() << '\n';

  const int nx = trace.records.empty()
                     ? 0
                     : static_cast<int>(trace.records[0].true_state.size());
  const int nu = trace.records.empty()
                     ? 0
                     : static_cast<int>(trace.records[0].control.size());
  const int nz = trace.records.empty()
                     ? 0
                     : static_cast<int>(trace.records[0].observation.size());

  out << "step,plan_time,replanned,planner_warning,kl_distance,cov_trace";
  for (int i = 0; i < nx; ++i) out << ",x" << i;
  for (int i = 0; i < nx; ++i) out << ",xhat" << i;
  for (int i = 0; i < nu; ++i) out << ",u" << i;
  for (int i = 0; i < nz; ++i) out << ",z" << i;
  out << '\n';

  for (const ExecutionRecord& rec : trace.records) {
    out << rec.step << ',' << rec.plan_time << ',' << (rec.replanned ? 1 : 0)
        << ',' << (rec.planner_warning ? 1 : 0) << ','
        << format_double(rec.kl_distance) << ','
        << format_double(rec.covariance_trace);
    for (int i = 0; i < nx; ++i) out << ',' << format_double(rec.true_state[i]);
    for (int i = 0; i < nx; ++i)
      out << ',' << format_double(rec.estimate_mean[i]);
    for (int i = 0; i < nu; ++i) out << ',' << format_double(rec.control[i]);
    for (int i = 0; i < nz; ++i)
      out << ',' << format_double(rec.observation[i]);
    out << '\n';
  }
}

void write_mvee_file(const std::string& path,
                     const std::vector<Ellipsoid>& ellipsoids) {
  std::ofstream out = open_out(path);
  out << "# tlqg mvee v1\n";
  out << "# polygons=" << ellipsoids.size() << '\n';
  out << "polygon,c0,c1,e00,e01,e11,major_ax,major_ay,major_bx,major_by,"
         "minor_ax,minor_ay,minor_bx,minor_by,regularized\n";
  for (size_t i = 0; i < ellipsoids.size(); ++i) {
    const Ellipsoid& e = ellipsoids[i];
    out << i << ',' << format_double(e.center[0]) << ','
        << format_double(e.center[1]) << ',' << format_double(e.shape(0, 0))
        << ',' << format_double(e.shape(0, 1)) << ','
        << format_double(e.shape(1, 1)) << ',' << format_double(e.major_a[0])
        << ',' << format_double(e.major_a[1]) << ','
        << format_double(e.major_b[0]) << ',' << format_double(e.major_b[1])
        << ',' << format_double(e.minor_a[0]) << ','
        << format_double(e.minor_a[1]) << ',' << format_double(e.minor_b[0])
        << ',' << format_double(e.minor_b[1]) << ','
        << (e.regularized ? 1 : 0) << '\n';
  }
}

std::vector<std::vector<Vector>> read_polygon_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open vertex file: " + path);
  }
  std::vector<std::vector<Vector>> polygons;
  std::vector<Vector> current;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      if (!current.empty()) {
        polygons.push_back(std::move(current));
        current.clear();
      }
      continue;
    }
    if (line[0] == '#') {
      continue;
    }
    const std::vector<std::string> fields = split(line, ',');
    if (fields.size() != 2) {
      throw ConfigError("malformed vertex line: '" + line + "'");
    }
    Vector p(2);
    p << parse_double(fields[0]), parse_double(fields[1]);
    current.push_back(std::move(p));
  }
  if (!current.empty()) {
    polygons.push_back(std::move(current));
  }
  return polygons;
}

}  // namespace tlqg
