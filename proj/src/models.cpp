#include "tlqg/models.hpp"

#include <cmath>
#include <sstream>

namespace tlqg {

MotionModel youbot_motion(const YoubotGeometry& geometry, double dt) {
  if (dt <= 0.0) {
    throw ConfigError("youbot_motion: dt must be positive");
  }
  if (geometry.wheel_radius <= 0.0 || geometry.half_length <= 0.0 ||
      geometry.half_width <= 0.0) {
    throw ConfigError("youbot_motion: geometry parameters must be positive");
  }

  const double r = geometry.wheel_radius;
  const double k = 1.0 / (geometry.half_length + geometry.half_width);
  Matrix kin(3, 4);
  kin << 1.0, 1.0, 1.0, 1.0,   // forward
      -1.0, 1.0, 1.0, -1.0,    // lateral
      -k, k, -k, k;            // rotation
  kin *= r / 4.0;

  const Matrix b = kin * dt;
  const Matrix g = std::sqrt(dt) * Matrix::Identity(3, 3);

  MotionModel model;
  model.state_dim = 3;
  model.control_dim = 4;
  model.noise_dim = 3;
  model.evaluate = [b, g](const Vector& x, const Vector& u, const Vector& w) {
    return Vector(x + b * u + g * w);
  };
  model.jacobians = [b, g](const Vector&, const Vector&) {
    return MotionJacobians{Matrix::Identity(3, 3), b, g};
  };
  return model;
}

ObservationParams default_observation_params(ObservationKind kind) {
  switch (kind) {
    case ObservationKind::kLightDarkQuadratic:
      return {0.1, 0.01, 0.0};
    case ObservationKind::kLightDarkHyperbolic:
      return {1.0, 0.01, 1.0};
    default:
      return {};
  }
}

ObservationKind observation_kind_from_string(const std::string& name) {
  if (name == "range_bearing") return ObservationKind::kRangeBearing;
  if (name == "bearing_only") return ObservationKind::kBearingOnly;
  if (name == "range_only") return ObservationKind::kRangeOnly;
  if (name == "range_squared") return ObservationKind::kRangeSquared;
  if (name == "light_dark_quadratic")
    return ObservationKind::kLightDarkQuadratic;
  if (name == "light_dark_hyperbolic")
    return ObservationKind::kLightDarkHyperbolic;
  throw ConfigError("unknown observation kind: " + name);
}

std::string to_string(ObservationKind kind) {
  switch (kind) {
    case ObservationKind::kRangeBearing: return "range_bearing";
    case ObservationKind::kBearingOnly: return "bearing_only";
    case ObservationKind::kRangeOnly: return "range_only";
    case ObservationKind::kRangeSquared: return "range_squared";
    case ObservationKind::kLightDarkQuadratic: return "light_dark_quadratic";
    case ObservationKind::kLightDarkHyperbolic: return "light_dark_hyperbolic";
  }
  return "unknown";
}

namespace {

constexpr double kMinRange = 1e-9;

void check_range(double range, const Eigen::Vector2d& landmark) {
  if (range < kMinRange) {
    std::ostringstream msg;
    msg << "observation singular: state coincides with landmark ("
        << landmark.x() << ", " << landmark.y() << ")";
    throw EvaluationError(msg.str());
  }
}

ObservationModel landmark_model(ObservationKind kind, const LandmarkMap& map) {
  const int per = kind == ObservationKind::kRangeBearing ? 2 : 1;
  const int nz = per * static_cast<int>(map.landmarks.size());

  ObservationModel model;
  model.obs_dim = nz;
  model.noise_dim = nz;
  model.evaluate = [kind, map, nz](const Vector& x, const Vector& v) {
    Vector z(nz);
    int row = 0;
    for (const auto& lm : map.landmarks) {
      const double dx = lm.x() - x[0];
      const double dy = lm.y() - x[1];
      const double range = std::hypot(dx, dy);
      switch (kind) {
        case ObservationKind::kRangeOnly:
          z[row++] = range;
          break;
        case ObservationKind::kRangeSquared:
          z[row++] = dx * dx + dy * dy;
          break;
        case ObservationKind::kBearingOnly:
          check_range(range, lm);
          z[row++] = wrap_angle(std::atan2(dy, dx) - x[2]);
          break;
        case ObservationKind::kRangeBearing:
          check_range(range, lm);
          z[row++] = range;
          z[row++] = wrap_angle(std::atan2(dy, dx) - x[2]);
          break;
        default:
          break;
      }
    }
    return Vector(z + v);
  };
  model.jacobians = [kind, map, nz](const Vector& x) {
    const int n = static_cast<int>(x.size());
    Matrix h = Matrix::Zero(nz, n);
    int row = 0;
    for (const auto& lm : map.landmarks) {
      const double dx = lm.x() - x[0];
      const double dy = lm.y() - x[1];
      const double r2 = dx * dx + dy * dy;
      const double range = std::sqrt(r2);
      switch (kind) {
        case ObservationKind::kRangeOnly:
          check_range(range, lm);
          h(row, 0) = -dx / range;
          h(row, 1) = -dy / range;
          ++row;
          break;
        case ObservationKind::kRangeSquared:
          h(row, 0) = -2.0 * dx;
          h(row, 1) = -2.0 * dy;
          ++row;
          break;
        case ObservationKind::kBearingOnly:
          check_range(range, lm);
          h(row, 0) = dy / r2;
          h(row, 1) = -dx / r2;
          h(row, 2) = -1.0;
          ++row;
          break;
        case ObservationKind::kRangeBearing:
          check_range(range, lm);
          h(row, 0) = -dx / range;
          h(row, 1) = -dy / range;
          ++row;
          h(row, 0) = dy / r2;
          h(row, 1) = -dx / r2;
          h(row, 2) = -1.0;
          ++row;
          break;
        default:
          break;
      }
    }
    return ObservationJacobians{h, Matrix::Identity(nz, nz)};
  };
  return model;
}

ObservationModel light_dark_model(ObservationKind kind,
                                  const ObservationParams& params) {
  const auto sigma = [kind, params](double xx) {
    if (kind == ObservationKind::kLightDarkQuadratic) {
      return params.a * (xx - 3.0) * (xx - 3.0) + params.b;
    }
    const double denom = xx + params.c;
    if (std::abs(denom) < 1e-12) {
      throw EvaluationError("light-dark hyperbolic noise scale singular at x = -c");
    }
    return params.a / denom + params.b;
  };

  ObservationModel model;
  model.obs_dim = 2;
  model.noise_dim = 2;
  model.evaluate = [sigma](const Vector& x, const Vector& v) {
    Vector z(2);
    z << x[0], x[1];
    return Vector(z + sigma(x[0]) * v);
  };
  model.jacobians = [sigma](const Vector& x) {
    const int n = static_cast<int>(x.size());
    Matrix h = Matrix::Zero(2, n);
    h(0, 0) = 1.0;
    h(1, 1) = 1.0;
    return ObservationJacobians{h, sigma(x[0]) * Matrix::Identity(2, 2)};
  };
  return model;
}

}  // namespace

ObservationModel make_observation_model(ObservationKind kind,
                                        const LandmarkMap& map,
                                        const ObservationParams& params) {
  switch (kind) {
    case ObservationKind::kRangeBearing:
    case ObservationKind::kBearingOnly:
    case ObservationKind::kRangeOnly:
    case ObservationKind::kRangeSquared:
      if (map.landmarks.empty()) {
        throw ConfigError("landmark observation model requires a non-empty map");
      }
      return landmark_model(kind, map);
    case ObservationKind::kLightDarkQuadratic:
    case ObservationKind::kLightDarkHyperbolic:
      return light_dark_model(kind, params);
  }
  throw ConfigError("unknown observation kind");
}

Matrix finite_difference_jacobian(
    const std::function<Vector(const Vector&)>& fn, const Vector& point,
    double step) {
  if (step <= 0.0) {
    throw ConfigError("finite_difference_jacobian: step must be positive");
  }
  const int n = static_cast<int>(point.size());
  Matrix jac;
  for (int j = 0; j < n; ++j) {
    Vector hi = point;
    Vector lo = point;
    hi[j] += step;
    lo[j] -= step;
    const Vector col = (fn(hi) - fn(lo)) / (2.0 * step);
    if (!col.allFinite()) {
      throw EvaluationError(
          "finite_difference_jacobian: non-finite function value near column " +
          std::to_string(j));
    }
    if (jac.size() == 0) {
      jac.resize(col.size(), n);
    }
    jac.col(j) = col;
  }
  if (n == 0) {
    jac.resize(fn(point).size(), 0);
  }
  return jac;
}

}  // namespace tlqg
