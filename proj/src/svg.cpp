#include "tlqg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace tlqg {

namespace {

struct Viewport {
  double min_x = 0.0, min_y = 0.0, max_x = 1.0, max_y = 1.0;
  double size = 640.0;
  double margin = 40.0;

  void include(double x, double y) {
    min_x = std::min(min_x, x);
    min_y = std::min(min_y, y);
    max_x = std::max(max_x, x);
    max_y = std::max(max_y, y);
  }

  double scale() const {
    const double span =
        std::max({max_x - min_x, max_y - min_y, 1e-6});
    return (size - 2.0 * margin) / span;
  }
  double px(double x) const { return margin + (x - min_x) * scale(); }
  double py(double y) const { return size - margin - (y - min_y) * scale(); }
};

std::string polyline_points(const std::vector<Vector>& pts, const Viewport& vp) {
  std::string out;
  for (const Vector& p : pts) {
    out += std::to_string(vp.px(p[0])) + "," + std::to_string(vp.py(p[1])) + " ";
  }
  return out;
}

void draw_ellipse(std::ofstream& out, const Viewport& vp, const Vector& center,
                  const Matrix& shape, const std::string& style,
                  bool shape_is_inverse) {
  // shape_is_inverse: matrix E with (x-c)'E(x-c) = 1 boundary; otherwise a
  // covariance whose 1-sigma ellipse is drawn.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(shape.topLeftCorner(2, 2));
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    return;
  }
  double r0, r1;
  if (shape_is_inverse) {
    r0 = 1.0 / std::sqrt(eig.eigenvalues()(0));
    r1 = 1.0 / std::sqrt(eig.eigenvalues()(1));
  } else {
    r0 = std::sqrt(eig.eigenvalues()(0));
    r1 = std::sqrt(eig.eigenvalues()(1));
  }
  const double angle =
      std::atan2(eig.eigenvectors()(1, 0), eig.eigenvectors()(0, 0)) * 180.0 /
      std::numbers::pi;
  out << "<ellipse cx='" << vp.px(center[0]) << "' cy='" << vp.py(center[1])
      << "' rx='" << r0 * vp.scale() << "' ry='" << r1 * vp.scale()
      << "' transform='rotate(" << -angle << ' ' << vp.px(center[0]) << ' '
      << vp.py(center[1]) << ")' " << style << "/>\n";
}

}  // namespace

void write_svg(const std::string& path, const SvgScene& scene) {
  Viewport vp;
  bool first = true;
  const auto include_point = [&](double x, double y) {
    if (first) {
      vp.min_x = vp.max_x = x;
      vp.min_y = vp.max_y = y;
      first = false;
    } else {
      vp.include(x, y);
    }
  };
  for (const auto& poly : scene.polygons) {
    for (const Vector& p : poly) include_point(p[0], p[1]);
  }
  for (const auto& lm : scene.landmarks) include_point(lm.x(), lm.y());
  for (const Vector& s : scene.seed.states) include_point(s[0], s[1]);
  for (const Vector& s : scene.optimized.states) include_point(s[0], s[1]);
  if (scene.goal.size() >= 2) include_point(scene.goal[0], scene.goal[1]);
  for (const Ellipsoid& e : scene.ellipsoids) {
    include_point(e.major_a[0], e.major_a[1]);
    include_point(e.major_b[0], e.major_b[1]);
  }

  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot open svg output file: " + path);
  }
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << vp.size
      << "' height='" << vp.size << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";

  for (const auto& poly : scene.polygons) {
    out << "<polygon points='" << polyline_points(poly, vp)
        << "' fill='#d64545' fill-opacity='0.8' stroke='#932020'/>\n";
  }
  for (const Ellipsoid& e : scene.ellipsoids) {
    draw_ellipse(out, vp, e.center, e.shape,
                 "fill='none' stroke='#932020' stroke-dasharray='3,3'", true);
  }
  for (const auto& lm : scene.landmarks) {
    out << "<circle cx='" << vp.px(lm.x()) << "' cy='" << vp.py(lm.y())
        << "' r='5' fill='#2b6cb0'/>\n";
  }
  if (scene.goal.size() >= 2 && scene.goal_radius > 0.0) {
    out << "<circle cx='" << vp.px(scene.goal[0]) << "' cy='"
        << vp.py(scene.goal[1]) << "' r='" << scene.goal_radius * vp.scale()
        << "' fill='none' stroke='#38a169' stroke-width='2'/>\n";
  }
  if (!scene.seed.states.empty()) {
    out << "<polyline points='" << polyline_points(scene.seed.states, vp)
        << "' fill='none' stroke='#38a169' stroke-dasharray='6,4'/>\n";
  }
  if (!scene.optimized.states.empty()) {
    for (size_t t = 0; t < scene.covariances.size() &&
                       t < scene.optimized.states.size();
         t += 2) {
      draw_ellipse(out, vp, scene.optimized.states[t], scene.covariances[t],
                   "fill='#ecc94b' fill-opacity='0.25' stroke='none'", false);
    }
    out << "<polyline points='" << polyline_points(scene.optimized.states, vp)
        << "' fill='none' stroke='#b7791f' stroke-width='2'/>\n";
  }
  out << "</svg>\n";
}

}  // namespace tlqg
