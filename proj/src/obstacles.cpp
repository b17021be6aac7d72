#include "tlqg/obstacles.hpp"

#include <cmath>
#include <numbers>

namespace tlqg {

Ellipsoid make_ellipsoid(const Vector& center, const Matrix& shape) {
  Ellipsoid e;
  e.center = center;
  e.shape = symmetrized(shape);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(e.shape);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw NumericalError("ellipsoid shape matrix must be positive definite");
  }
  // Semi-axis length along eigenvector v_i is 1/sqrt(lambda_i); the longest
  // axis pairs with the smallest eigenvalue (eigenvalues are ascending).
  const int d = static_cast<int>(center.size());
  const Vector v_major = eig.eigenvectors().col(0);
  const Vector v_minor = eig.eigenvectors().col(d - 1);
  const double len_major = 1.0 / std::sqrt(eig.eigenvalues()(0));
  const double len_minor = 1.0 / std::sqrt(eig.eigenvalues()(d - 1));
  e.major_a = center + len_major * v_major;
  e.major_b = center - len_major * v_major;
  e.minor_a = center + len_minor * v_minor;
  e.minor_b = center - len_minor * v_minor;
  return e;
}

Ellipsoid mvee(const std::vector<Vector>& points, double tolerance,
               int max_iterations) {
  if (points.empty()) {
    throw ConfigError("mvee: empty point set");
  }
  const int d = static_cast<int>(points[0].size());
  int m = static_cast<int>(points.size());

  Matrix p(d, m);
  for (int j = 0; j < m; ++j) {
    p.col(j) = points[j];
  }

  // Rank check on the centered points; pad degenerate sets with points
  // offset along the missing directions.
  bool regularized = false;
  {
    const Vector centroid = p.rowwise().mean();
    Matrix centered = p.colwise() - centroid;
    Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeFullU);
    const double scale = std::max(1.0, svd.singularValues().size() > 0
                                           ? svd.singularValues()(0)
                                           : 1.0);
    std::vector<Vector> extra;
    for (int i = 0; i < d; ++i) {
      const double sv = i < svd.singularValues().size()
                            ? svd.singularValues()(i)
                            : 0.0;
      if (sv <= 1e-9 * scale) {
        const Vector dir = svd.matrixU().col(i);
        extra.push_back(centroid + 1e-6 * dir);
        extra.push_back(centroid - 1e-6 * dir);
      }
    }
    if (!extra.empty()) {
      regularized = true;
      p.conservativeResize(d, m + static_cast<int>(extra.size()));
      for (size_t k = 0; k < extra.size(); ++k) {
        p.col(m + static_cast<int>(k)) = extra[k];
      }
      m += static_cast<int>(extra.size());
    }
  }

  // Lifted points q_j = (p_j; 1).
  Matrix q(d + 1, m);
  q.topRows(d) = p;
  q.row(d).setOnes();

  // Frank-Wolfe iteration with away steps (linear convergence; the plain
  // add-only update needs O(1/eps) iterations to tighten the gap).
  Vector u = Vector::Constant(m, 1.0 / m);
  const double n_lift = d + 1.0;
  for (int it = 0; it < max_iterations; ++it) {
    const Matrix x = q * u.asDiagonal() * q.transpose();
    const Matrix x_inv = invert_innovation(x);
    double kappa_add = -1.0, kappa_away = 1e300;
    int j_add = 0, j_away = -1;
    for (int j = 0; j < m; ++j) {
      const double mj = q.col(j).dot(x_inv * q.col(j));
      if (mj > kappa_add) {
        kappa_add = mj;
        j_add = j;
      }
      if (u[j] > 1e-12 && mj < kappa_away) {
        kappa_away = mj;
        j_away = j;
      }
    }
    // kappa - (d+1) <= tol * d makes the containment level <= 1 + tol.
    if (kappa_add - n_lift <= tolerance * d) {
      break;
    }
    const bool take_add = j_away < 0 || kappa_away <= 1.0 + 1e-12 ||
                          (kappa_add - n_lift) >= (n_lift - kappa_away);
    if (take_add) {
      const double step =
          (kappa_add - n_lift) / (n_lift * (kappa_add - 1.0));
      u *= (1.0 - step);
      u[j_add] += step;
    } else {
      // u <- (1+s) u - s e_j, with s capped so u_j stays non-negative.
      const double step =
          std::min((n_lift - kappa_away) / (n_lift * (kappa_away - 1.0)),
                   u[j_away] / (1.0 - u[j_away]));
      u *= (1.0 + step);
      u[j_away] = std::max(u[j_away] - step, 0.0);
    }
  }

  const Vector center = p * u;
  const Matrix second = p * u.asDiagonal() * p.transpose() -
                        center * center.transpose();
  const Matrix shape = invert_innovation(second) / d;
  Ellipsoid e = make_ellipsoid(center, symmetrized(shape));
  e.regularized = regularized;
  return e;
}

std::vector<Vector> inflate_polygon(const std::vector<Vector>& vertices,
                                    double radius) {
  if (radius < 0.0) {
    throw ConfigError("inflate_polygon: radius must be non-negative");
  }
  if (radius == 0.0) {
    return vertices;
  }
  std::vector<Vector> out;
  out.reserve(vertices.size() * 8);
  for (const Vector& v : vertices) {
    for (int k = 0; k < 8; ++k) {
      const double a = 2.0 * std::numbers::pi * k / 8.0;
      Vector p = v;
      p[0] += radius * std::cos(a);
      p[1] += radius * std::sin(a);
      out.push_back(p);
    }
  }
  return out;
}

namespace {

double axis_inverse_sum(const Vector& x, const Vector& end_a,
                        const Vector& end_b, int samples, bool* singular) {
  double sum = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const double theta = static_cast<double>(k) / samples;
    const Vector pt = theta * end_a + (1.0 - theta) * end_b;
    const double d2 = (x - pt).squaredNorm();
    if (d2 < 1e-18) {
      if (singular != nullptr) {
        *singular = true;
      }
      return 1e18;
    }
    sum += 1.0 / d2;
  }
  return sum;
}

}  // namespace

double obf_value(const ObstacleSet& set, const Vector& x, bool* singular) {
  if (singular != nullptr) {
    *singular = false;
  }
  double phi = 0.0;
  for (const Ellipsoid& e : set.ellipsoids) {
    const Vector dx = x - e.center;
    const double level = dx.dot(e.shape * dx);
    phi += set.m1 * std::exp(-std::pow(level, set.q));
    if (set.m2 > 0.0) {
      bool hit = false;
      const double axes =
          axis_inverse_sum(x, e.major_a, e.major_b, set.axis_samples, &hit) +
          axis_inverse_sum(x, e.minor_a, e.minor_b, set.axis_samples, &hit);
      if (hit) {
        if (singular != nullptr) {
          *singular = true;
        }
        return 1e18;
      }
      phi += set.m2 * axes;
    }
  }
  return phi;
}

double obstacle_cost(const ObstacleSet& set, const Vector& x1,
                     const Vector& x2) {
  const double length = (x2 - x1).norm();
  if (length == 0.0) {
    return 0.0;
  }
  const int r = set.riemann_points;
  double sum = 0.0;
  for (int j = 1; j <= r; ++j) {
    const double s = (j - 0.5) / r;
    sum += obf_value(set, x1 + s * (x2 - x1));
  }
  return length / r * sum;
}

}  // namespace tlqg
