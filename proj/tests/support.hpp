#pragma once

#include "tlqg/models.hpp"

namespace tlqg::test {

// x_{t+1} = A x + B u + G w, no dependence on the operating point.
inline MotionModel linear_motion(const Matrix& a, const Matrix& b,
                                 const Matrix& g) {
  MotionModel m;
  m.state_dim = static_cast<int>(a.rows());
  m.control_dim = static_cast<int>(b.cols());
  m.noise_dim = static_cast<int>(g.cols());
  m.evaluate = [a, b, g](const Vector& x, const Vector& u, const Vector& w) {
    return Vector(a * x + b * u + g * w);
  };
  m.jacobians = [a, b, g](const Vector&, const Vector&) {
    return MotionJacobians{a, b, g};
  };
  return m;
}

// z = H x + M v.
inline ObservationModel linear_observation(const Matrix& h, const Matrix& m) {
  ObservationModel o;
  o.obs_dim = static_cast<int>(h.rows());
  o.noise_dim = static_cast<int>(m.cols());
  o.evaluate = [h, m](const Vector& x, const Vector& v) {
    return Vector(h * x + m * v);
  };
  o.jacobians = [h, m](const Vector&) { return ObservationJacobians{h, m}; };
  return o;
}

inline Matrix mat1(double v) {
  Matrix m(1, 1);
  m << v;
  return m;
}

inline Vector vec1(double v) {
  Vector x(1);
  x << v;
  return x;
}

inline Vector vec3(double a, double b, double c) {
  Vector x(3);
  x << a, b, c;
  return x;
}

}  // namespace tlqg::test
