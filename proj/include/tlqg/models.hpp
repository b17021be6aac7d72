#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tlqg/common.hpp"

namespace tlqg {

struct MotionJacobians {
  Matrix a;  // d f / d x
  Matrix b;  // d f / d u
  Matrix g;  // d f / d w
};

struct ObservationJacobians {
  Matrix h;  // d h / d x
  Matrix m;  // d h / d v
};

// x_{t+1} = evaluate(x, u, w); jacobians taken at (x, u, 0).
// Models are immutable after construction and safe to evaluate concurrently.
struct MotionModel {
  int state_dim = 0;
  int control_dim = 0;
  int noise_dim = 0;
  std::function<Vector(const Vector&, const Vector&, const Vector&)> evaluate;
  std::function<MotionJacobians(const Vector&, const Vector&)> jacobians;
};

// z = evaluate(x, v); jacobians taken at (x, 0).
struct ObservationModel {
  int obs_dim = 0;
  int noise_dim = 0;
  std::function<Vector(const Vector&, const Vector&)> evaluate;
  std::function<ObservationJacobians(const Vector&)> jacobians;
};

struct NoiseSpec {
  Matrix sigma_omega;  // process noise covariance (symmetric PSD)
  Matrix sigma_nu;     // observation noise covariance (symmetric PSD)
};

struct LandmarkMap {
  std::vector<Eigen::Vector2d> landmarks;
};

struct YoubotGeometry {
  double wheel_radius = 0.05;  // m
  double half_length = 0.235;  // m, wheel center to body center, longitudinal
  double half_width = 0.15;    // m, lateral
};

// Mecanum base: state (x, y, theta), controls = 4 wheel speeds.
// x_{t+1} = x + B u dt + G w sqrt(dt) with constant B (inverse kinematics)
// and G = I, so the state Jacobian is exactly the identity.
MotionModel youbot_motion(const YoubotGeometry& geometry, double dt);

enum class ObservationKind {
  kRangeBearing,
  kBearingOnly,
  kRangeOnly,
  kRangeSquared,
  kLightDarkQuadratic,
  kLightDarkHyperbolic,
};

// Constants for the light-dark noise scale:
//   quadratic:  sigma(x) = a * (x_x - 3)^2 + b
//   hyperbolic: sigma(x) = a / (x_x + c) + b
struct ObservationParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

ObservationParams default_observation_params(ObservationKind kind);

ObservationKind observation_kind_from_string(const std::string& name);
std::string to_string(ObservationKind kind);

// Landmark kinds stack per-landmark measurements with additive noise (M = I).
// Light-dark kinds observe the planar position with state-dependent noise
// scale: h(x, v) = x_pos + sigma(x) * v.
ObservationModel make_observation_model(ObservationKind kind,
                                        const LandmarkMap& map,
                                        const ObservationParams& params);

// Central differences, column j = (fn(p + s e_j) - fn(p - s e_j)) / (2 s).
Matrix finite_difference_jacobian(
    const std::function<Vector(const Vector&)>& fn, const Vector& point,
    double step);

}  // namespace tlqg
