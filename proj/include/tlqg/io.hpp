#pragma once

#include <string>
#include <vector>

#include "tlqg/executor.hpp"
#include "tlqg/obstacles.hpp"
#include "tlqg/planner.hpp"

namespace tlqg {

// Locale-independent, 17 significant digits (lossless double round trip).
std::string format_double(double v);
double parse_double(const std::string& text);

// Plan file: '#'-prefixed metadata, then CSV rows
//   section,t,v0,v1,...  with sections seed_state/seed_control/opt_state/
//   opt_control/cov_trace/ellipsoid.
void write_plan_file(const std::string& path, const std::string& scenario_name,
                     const PlanResult& result,
                     const NominalTrajectory& seed_trajectory,
                     const std::vector<Ellipsoid>& ellipsoids);

// Reads back the optimized trajectory of a plan file.
NominalTrajectory read_plan_trajectory(const std::string& path);

// Trace file: '#'-prefixed metadata, then one CSV row per executed step.
void write_trace_file(const std::string& path, const std::string& scenario_name,
                      const ExecutionTrace& trace);

void write_mvee_file(const std::string& path,
                     const std::vector<Ellipsoid>& ellipsoids);

// Vertex file for the mvee command: one "x,y" line per vertex, polygons
// separated by blank lines; '#' starts a comment.
std::vector<std::vector<Vector>> read_polygon_file(const std::string& path);

}  // namespace tlqg
