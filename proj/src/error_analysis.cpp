#include "tlqg/error_analysis.hpp"

#include <cmath>

#include "tlqg/controller.hpp"

namespace tlqg {

namespace {

Matrix random_matrix(int rows, int cols, CounterRng& rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      m(i, j) = 2.0 * rng.uniform() - 1.0;
    }
  }
  return m;
}

Matrix random_psd(int n, CounterRng& rng) {
  const Matrix r = random_matrix(n, n, rng);
  return symmetrized(r * r.transpose() / n + 0.05 * Matrix::Identity(n, n));
}

double spectral_radius(const Matrix& a) {
  return a.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

LtvSystem make_random_ltv(int nx, int nu, int nz, int horizon,
                          const Matrix& wx, const Matrix& wu, CounterRng& rng) {
  LtvSystem sys;
  sys.horizon = horizon;
  sys.nx = nx;
  sys.nu = nu;
  sys.nz = nz;
  sys.a.resize(horizon);
  sys.b.resize(horizon);
  sys.g.resize(horizon);
  sys.h.resize(horizon + 1);
  sys.m.resize(horizon + 1);
  for (int t = 0; t < horizon; ++t) {
    Matrix a = random_matrix(nx, nx, rng);
    const double rho = spectral_radius(a);
    if (rho > 0.95) {
      a *= 0.95 / rho;
    }
    sys.a[t] = a;
    sys.b[t] = random_matrix(nx, nu, rng);
    sys.g[t] = random_matrix(nx, nx, rng);
  }
  for (int t = 1; t <= horizon; ++t) {
    sys.h[t] = random_matrix(nz, nx, rng);
    sys.m[t] = random_matrix(nz, nz, rng) +
               2.0 * Matrix::Identity(nz, nz);  // keep S comfortably invertible
  }
  sys.noise.sigma_omega = random_psd(nx, rng);
  sys.noise.sigma_nu = random_psd(nz, rng);
  sys.initial_covariance = random_psd(nx, rng);

  // Kalman gains from the covariance recursion of this same system.
  sys.kalman_gains.assign(horizon + 1, Matrix());
  Matrix p = sys.initial_covariance;
  for (int t = 1; t <= horizon; ++t) {
    const RiccatiStep step =
        riccati_step(p, sys.a[t - 1], sys.g[t - 1], sys.h[t], sys.m[t], sys.noise);
    sys.kalman_gains[t] = step.k;
    p = step.p_plus;
  }

  // LQR gains from the backward recursion; the gain at t = 0 is zeroed
  // because the initial estimate coincides with the nominal start.
  sys.lqr_gains.assign(horizon, Matrix::Zero(nu, nx));
  std::vector<Matrix> values(horizon + 1);
  values[horizon] = wx;
  for (int t = horizon - 1; t >= 0; --t) {
    const LqrStep step = lqr_step(values[t + 1], sys.a[t], sys.b[t], wx, wu);
    values[t] = step.value;
    if (t > 0) {
      sys.lqr_gains[t] = step.gain;
    }
  }
  return sys;
}

ErrorRealization sample_realization(const LtvSystem& sys, CounterRng& rng) {
  ErrorRealization real;
  real.x0_error = sample_gaussian(Vector::Zero(sys.nx),
                                  sys.initial_covariance, rng);
  real.process_noise.resize(sys.horizon);
  for (int t = 0; t < sys.horizon; ++t) {
    real.process_noise[t] = sample_gaussian(
        Vector::Zero(sys.noise_dim_omega()), sys.noise.sigma_omega, rng);
  }
  real.observation_noise.assign(sys.horizon + 1, Vector());
  for (int t = 1; t <= sys.horizon; ++t) {
    real.observation_noise[t] = sample_gaussian(
        Vector::Zero(sys.noise_dim_nu()), sys.noise.sigma_nu, rng);
  }
  return real;
}

ErrorSequences recursive_errors(const LtvSystem& sys,
                                const ErrorRealization& real) {
  const int horizon = sys.horizon;
  ErrorSequences seq;
  seq.state_error.resize(horizon + 1);
  seq.estimation_error.resize(horizon + 1);
  seq.control_error.resize(horizon);
  seq.observation_error.assign(horizon + 1, Vector());

  seq.state_error[0] = real.x0_error;
  seq.estimation_error[0] = real.x0_error;  // xhat_0 = x^p_0
  const Matrix eye = Matrix::Identity(sys.nx, sys.nx);
  for (int t = 0; t < horizon; ++t) {
    seq.control_error[t] =
        -sys.lqr_gains[t] * (seq.state_error[t] - seq.estimation_error[t]);
    seq.state_error[t + 1] = sys.a[t] * seq.state_error[t] +
                             sys.b[t] * seq.control_error[t] +
                             sys.g[t] * real.process_noise[t];
    const Matrix u_next = eye - sys.kalman_gains[t + 1] * sys.h[t + 1];
    seq.estimation_error[t + 1] =
        u_next * sys.a[t] * seq.estimation_error[t] +
        u_next * sys.g[t] * real.process_noise[t] -
        sys.kalman_gains[t + 1] * sys.m[t + 1] * real.observation_noise[t + 1];
    seq.observation_error[t + 1] =
        sys.h[t + 1] * seq.state_error[t + 1] +
        sys.m[t + 1] * real.observation_noise[t + 1];
  }
  return seq;
}

Matrix product_descending(const std::vector<Matrix>& factors, int t1, int t2,
                          int dim) {
  Matrix out = Matrix::Identity(dim, dim);
  for (int t = t2; t >= t1; --t) {
    out = out * factors[t];
  }
  return out;
}

namespace {

// Per-system cache of the elementary factors of the composite
// error-propagation matrices.
struct Composites {
  const LtvSystem& sys;
  std::vector<Matrix> f_factors;  // F_t = (I - K_{t+1} H_{t+1}) A_t, t = 0..K-1
  std::vector<Matrix> d_factors;  // D_t = A_t - B_t L_t, t = 0..K-1
  std::vector<Matrix> u_factors;  // U_{t+1} = I - K_{t+1} H_{t+1}, index t+1

  explicit Composites(const LtvSystem& s) : sys(s) {
    const int horizon = s.horizon;
    const Matrix eye = Matrix::Identity(s.nx, s.nx);
    u_factors.assign(horizon + 1, Matrix());
    f_factors.resize(horizon);
    d_factors.resize(horizon);
    for (int t = 0; t < horizon; ++t) {
      u_factors[t + 1] = eye - s.kalman_gains[t + 1] * s.h[t + 1];
      f_factors[t] = u_factors[t + 1] * s.a[t];
      d_factors[t] = s.a[t] - s.b[t] * s.lqr_gains[t];
    }
  }

  Matrix prod_f(int t1, int t2) const {
    return product_descending(f_factors, t1, t2, sys.nx);
  }
  Matrix prod_d(int t1, int t2) const {
    return product_descending(d_factors, t1, t2, sys.nx);
  }

  // Coefficients of L_t xe_t expanded by the estimation-error closed form.
  Matrix fx0(int t) const { return sys.lqr_gains[t] * prod_f(0, t - 1); }
  Matrix fom(int s, int t) const {
    return sys.lqr_gains[t] * prod_f(s + 1, t - 1) * u_factors[s + 1] *
           sys.g[s];
  }
  Matrix fnu(int s, int t) const {
    return sys.lqr_gains[t] * prod_f(s + 1, t - 1) * sys.kalman_gains[s + 1] *
           sys.m[s + 1];
  }

  // State-error composites; dnu carries the coefficient of v_{s+1} and is
  // applied with a minus sign.
  Matrix dx0(int t) const {
    Matrix out = prod_d(0, t);
    for (int r = 1; r <= t; ++r) {
      out += prod_d(r + 1, t) * sys.b[r] * fx0(r);
    }
    return out;
  }
  Matrix dom(int s, int t) const {
    if (s == t) {
      return sys.g[t];
    }
    Matrix out = prod_d(s + 1, t) * sys.g[s];
    for (int r = s + 1; r <= t; ++r) {
      out += prod_d(r + 1, t) * sys.b[r] * fom(s, r);
    }
    return out;
  }
  Matrix dnu(int s, int t) const {
    Matrix out = Matrix::Zero(sys.nx, sys.noise_dim_nu());
    for (int r = s + 1; r <= t; ++r) {
      out += prod_d(r + 1, t) * sys.b[r] * fnu(s, r);
    }
    return out;
  }

  // Control-error composites; u~_t = -lx0(t) x0 - sum lom w - sum lnu v.
  Matrix lx0(int t) const { return sys.lqr_gains[t] * dx0(t - 1) - fx0(t); }
  Matrix lom(int s, int t) const {
    return sys.lqr_gains[t] * dom(s, t - 1) - fom(s, t);
  }
  Matrix lnu(int s, int t) const {
    return fnu(s, t) - sys.lqr_gains[t] * dnu(s, t - 1);
  }

  // Observation-error composites; hnu carries the coefficient of v_{s+1}.
  Matrix hx0(int t) const { return sys.h[t] * dx0(t - 1); }
  Matrix hom(int s, int t) const { return sys.h[t] * dom(s, t - 1); }
  Matrix hnu(int s, int t) const {
    if (s + 1 == t) {
      return sys.m[t];
    }
    return -sys.h[t] * dnu(s, t - 1);
  }
};

}  // namespace

Vector lemma1_estimation_error(const LtvSystem& sys,
                               const ErrorRealization& real, int t) {
  if (t < -1 || t >= sys.horizon) {
    throw std::out_of_range("lemma1_estimation_error: t outside [-1, K-1]");
  }
  const Composites c(sys);
  Vector out = c.prod_f(0, t) * real.x0_error;
  for (int s = 0; s <= t; ++s) {
    out += c.prod_f(s + 1, t) *
           (c.u_factors[s + 1] * sys.g[s] * real.process_noise[s] -
            sys.kalman_gains[s + 1] * sys.m[s + 1] *
                real.observation_noise[s + 1]);
  }
  return out;
}

Vector lemma2_state_error(const LtvSystem& sys, const ErrorRealization& real,
                          int t) {
  if (t < -1 || t >= sys.horizon) {
    throw std::out_of_range("lemma2_state_error: t outside [-1, K-1]");
  }
  const Composites c(sys);
  Vector out = c.dx0(t) * real.x0_error;
  for (int s = 0; s <= t; ++s) {
    out += c.dom(s, t) * real.process_noise[s];
  }
  for (int s = 0; s <= t - 1; ++s) {
    out -= c.dnu(s, t) * real.observation_noise[s + 1];
  }
  return out;
}

Vector lemma3_control_error(const LtvSystem& sys, const ErrorRealization& real,
                            int t) {
  if (t < -1 || t >= sys.horizon - 1) {
    throw std::out_of_range("lemma3_control_error: t outside [-1, K-2]");
  }
  const Composites c(sys);
  Vector out = -(c.lx0(t + 1) * real.x0_error);
  for (int s = 0; s <= t; ++s) {
    out -= c.lom(s, t + 1) * real.process_noise[s];
  }
  for (int s = 0; s <= t; ++s) {
    out -= c.lnu(s, t + 1) * real.observation_noise[s + 1];
  }
  return out;
}

Vector lemma4_observation_error(const LtvSystem& sys,
                                const ErrorRealization& real, int t) {
  if (t < 0 || t >= sys.horizon) {
    throw std::out_of_range("lemma4_observation_error: t outside [0, K-1]");
  }
  const Composites c(sys);
  Vector out = c.hx0(t + 1) * real.x0_error;
  for (int s = 0; s <= t; ++s) {
    out += c.hom(s, t + 1) * real.process_noise[s];
  }
  for (int s = 0; s <= t; ++s) {
    out += c.hnu(s, t + 1) * real.observation_noise[s + 1];
  }
  return out;
}

int belief_dim(int nx) { return nx + nx * (nx + 1) / 2; }

Vector belief_to_vector(const Vector& mean, const Matrix& covariance) {
  const int nx = static_cast<int>(mean.size());
  Vector out(belief_dim(nx));
  out.head(nx) = mean;
  int k = nx;
  for (int i = 0; i < nx; ++i) {
    for (int j = i; j < nx; ++j) {
      out[k++] = covariance(i, j);
    }
  }
  return out;
}

void vector_to_belief(const Vector& bvec, int nx, Vector* mean,
                      Matrix* covariance) {
  *mean = bvec.head(nx);
  covariance->resize(nx, nx);
  int k = nx;
  for (int i = 0; i < nx; ++i) {
    for (int j = i; j < nx; ++j) {
      (*covariance)(i, j) = bvec[k];
      (*covariance)(j, i) = bvec[k];
      ++k;
    }
  }
}

Vector kf_belief_map(const LtvSystem& sys, int t, const Vector& bvec,
                     const Vector& control, const Vector& observation) {
  Vector mean;
  Matrix p;
  vector_to_belief(bvec, sys.nx, &mean, &p);

  const Vector mean_pred = sys.a[t] * mean + sys.b[t] * control;
  const Matrix p_pred = sys.a[t] * p * sys.a[t].transpose() +
                        sys.g[t] * sys.noise.sigma_omega * sys.g[t].transpose();
  const Matrix& h = sys.h[t + 1];
  const Matrix& m = sys.m[t + 1];
  const Matrix s = h * p_pred * h.transpose() +
                   m * sys.noise.sigma_nu * m.transpose();
  const Matrix gain = p_pred * h.transpose() * invert_innovation(s);
  const Vector mean_new = mean_pred + gain * (observation - h * mean_pred);
  const Matrix p_new = symmetrized(
      (Matrix::Identity(sys.nx, sys.nx) - gain * h) * p_pred);
  return belief_to_vector(mean_new, p_new);
}

BeliefJacobians belief_jacobians_fd(const LtvSystem& sys, double step) {
  BeliefJacobians jac;
  jac.t_b.resize(sys.horizon);
  jac.t_u.resize(sys.horizon);
  jac.t_z.resize(sys.horizon);

  // Nominal path: zero means/controls/observations, covariance from the
  // same recursion the gains were derived from.
  Matrix p = sys.initial_covariance;
  for (int t = 0; t < sys.horizon; ++t) {
    const Vector b_nom = belief_to_vector(Vector::Zero(sys.nx), p);
    const Vector u_nom = Vector::Zero(sys.nu);
    const Vector z_nom = Vector::Zero(sys.nz);
    jac.t_b[t] = finite_difference_jacobian(
        [&](const Vector& b) { return kf_belief_map(sys, t, b, u_nom, z_nom); },
        b_nom, step);
    jac.t_u[t] = finite_difference_jacobian(
        [&](const Vector& u) { return kf_belief_map(sys, t, b_nom, u, z_nom); },
        u_nom, step);
    jac.t_z[t] = finite_difference_jacobian(
        [&](const Vector& z) { return kf_belief_map(sys, t, b_nom, u_nom, z); },
        z_nom, step);

    const RiccatiStep rs = riccati_step(p, sys.a[t], sys.g[t], sys.h[t + 1],
                                        sys.m[t + 1], sys.noise);
    p = rs.p_plus;
  }
  return jac;
}

std::vector<Vector> recursive_belief_errors(const LtvSystem& sys,
                                            const ErrorRealization& real,
                                            const BeliefJacobians& jac) {
  const ErrorSequences seq = recursive_errors(sys, real);
  std::vector<Vector> beliefs(sys.horizon + 1);
  beliefs[0] = Vector::Zero(belief_dim(sys.nx));
  for (int t = 0; t < sys.horizon; ++t) {
    beliefs[t + 1] = jac.t_b[t] * beliefs[t] + jac.t_u[t] * seq.control_error[t] +
                     jac.t_z[t] * seq.observation_error[t + 1];
  }
  return beliefs;
}

Vector lemma5_belief_error(const LtvSystem& sys, const ErrorRealization& real,
                           int t, const BeliefJacobians& jac) {
  if (t < 0 || t > sys.horizon) {
    throw std::out_of_range("lemma5_belief_error: t outside [0, K]");
  }
  const int dim = belief_dim(sys.nx);
  if (t == 0) {
    return Vector::Zero(dim);
  }
  const Composites c(sys);
  const auto prod_tb = [&](int t1, int t2) {
    return product_descending(jac.t_b, t1, t2, dim);
  };

  // Coefficient of the initial state error.
  Matrix tx0 = jac.t_z[t - 1] * c.hx0(t);
  for (int s = 0; s <= t - 2; ++s) {
    tx0 += -prod_tb(s + 2, t - 1) * jac.t_u[s + 1] * c.lx0(s + 1) +
           prod_tb(s + 1, t - 1) * jac.t_z[s] * c.hx0(s + 1);
  }
  Vector out = tx0 * real.x0_error;

  // Process noise coefficients.
  for (int s = 0; s <= t - 1; ++s) {
    Matrix tom = jac.t_z[t - 1] * c.hom(s, t);
    for (int r = s; r <= t - 2; ++r) {
      tom += -prod_tb(r + 2, t - 1) * jac.t_u[r + 1] * c.lom(s, r + 1) +
             prod_tb(r + 1, t - 1) * jac.t_z[r] * c.hom(s, r + 1);
    }
    out += tom * real.process_noise[s];
  }

  // Observation noise coefficients (v_s, s = 1..t).
  for (int s = 1; s <= t; ++s) {
    Matrix tnu = jac.t_z[t - 1] * c.hnu(s - 1, t);
    for (int r = s - 1; r <= t - 2; ++r) {
      tnu += -prod_tb(r + 2, t - 1) * jac.t_u[r + 1] * c.lnu(s - 1, r + 1) +
             prod_tb(r + 1, t - 1) * jac.t_z[r] * c.hnu(s - 1, r + 1);
    }
    out += tnu * real.observation_noise[s];
  }
  return out;
}

Theorem1Result theorem1_cost_error_check(const LtvSystem& sys,
                                         const std::vector<Vector>& cost_b,
                                         const std::vector<Vector>& cost_u,
                                         int samples, std::uint64_t seed,
                                         const Vector& x0_bias) {
  if (samples < 1) {
    throw ConfigError("theorem1_cost_error_check: samples must be >= 1");
  }
  const BeliefJacobians jac = belief_jacobians_fd(sys);
  CounterRng rng(seed);

  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < samples; ++i) {
    ErrorRealization real = sample_realization(sys, rng);
    if (x0_bias.size() > 0) {
      real.x0_error += x0_bias;
    }
    const ErrorSequences seq = recursive_errors(sys, real);
    const std::vector<Vector> beliefs = recursive_belief_errors(sys, real, jac);
    double j_err = 0.0;
    for (int t = 0; t < sys.horizon; ++t) {
      j_err += cost_b[t].dot(beliefs[t]) + cost_u[t].dot(seq.control_error[t]);
    }
    j_err += cost_b[sys.horizon].dot(beliefs[sys.horizon]);
    sum += j_err;
    sum_sq += j_err * j_err;
  }
  Theorem1Result res;
  res.mean = sum / samples;
  const double var =
      std::max(0.0, sum_sq / samples - res.mean * res.mean);
  res.standard_error = std::sqrt(var / samples);
  return res;
}

}  // namespace tlqg
