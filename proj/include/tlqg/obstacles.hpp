#pragma once

#include <vector>

#include "tlqg/common.hpp"

namespace tlqg {

// Interior = { x : (x - c)' E (x - c) <= 1 }. Axis endpoints come from the
// eigendecomposition of E: the major axis is the longest semi-axis.
struct Ellipsoid {
  Vector center;
  Matrix shape;
  Vector major_a, major_b;  // endpoints of the major axis
  Vector minor_a, minor_b;  // endpoints of the minor axis
  bool regularized = false; // the generating point set was rank-deficient
};

Ellipsoid make_ellipsoid(const Vector& center, const Matrix& shape);

// Khachiyan dual iteration. All input points end up with
// (p - c)' E (p - c) <= 1 + tolerance. Rank-deficient point sets are
// regularized by adding points offset 1e-6 along the null directions; the
// result is flagged.
Ellipsoid mvee(const std::vector<Vector>& points, double tolerance = 1e-7,
               int max_iterations = 10000);

// Octagonal over-approximation: each vertex becomes 8 points on a circle of
// the given radius. radius == 0 returns the vertices unchanged.
std::vector<Vector> inflate_polygon(const std::vector<Vector>& vertices,
                                    double radius);

struct ObstacleSet {
  std::vector<Ellipsoid> ellipsoids;
  double m1 = 10.0;       // territory amplitude
  double m2 = 0.1;        // singular-term amplitude
  int q = 2;              // territory exponent
  int axis_samples = 10;  // eps_m = 1 / axis_samples
  int riemann_points = 5; // segment subdivisions for the line integral
};

// Barrier value
//   Phi(x) = sum_i [ m1 exp(-((x-c)' E (x-c))^q)
//                  + m2 sum_theta (|x - axis_pt|^-2 over both axes) ].
// Within 1e-9 of an axis sample the value is clamped to 1e18 and flagged.
double obf_value(const ObstacleSet& set, const Vector& x,
                 bool* singular = nullptr);

// Midpoint Riemann approximation of the line integral of Phi from x1 to x2.
double obstacle_cost(const ObstacleSet& set, const Vector& x1,
                     const Vector& x2);

}  // namespace tlqg
