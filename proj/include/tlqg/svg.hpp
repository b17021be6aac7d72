#pragma once

#include <string>
#include <vector>

#include "tlqg/obstacles.hpp"
#include "tlqg/scenario.hpp"
#include "tlqg/trajectory.hpp"

namespace tlqg {

// Static plot of a planning scene: obstacle polygons and their enclosing
// ellipsoids, landmarks, the goal region, the seed trajectory (dashed) and
// the optimized/executed one (solid), plus optional 1-sigma position
// ellipses along the optimized trajectory.
struct SvgScene {
  std::vector<std::vector<Vector>> polygons;
  std::vector<Ellipsoid> ellipsoids;
  std::vector<Eigen::Vector2d> landmarks;
  Vector goal;                  // may be empty
  double goal_radius = 0.0;
  NominalTrajectory seed;       // may be empty
  NominalTrajectory optimized;  // may be empty
  std::vector<Matrix> covariances;  // per optimized state, may be empty
};

void write_svg(const std::string& path, const SvgScene& scene);

}  // namespace tlqg
