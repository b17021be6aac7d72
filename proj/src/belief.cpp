#include "tlqg/belief.hpp"

#include <cmath>
#include <sstream>

#include "tlqg/rng.hpp"

namespace tlqg {

GaussianBelief make_belief(Vector mean, Matrix covariance) {
  GaussianBelief b;
  b.mean = std::move(mean);
  b.covariance = symmetrized(covariance);
  if (b.covariance.size() > 0 && min_eigenvalue(b.covariance) < -1e-9) {
    throw NumericalError("belief covariance has a significant negative eigenvalue");
  }
  return b;
}

RiccatiStep riccati_step(const Matrix& prev, const Matrix& a, const Matrix& g,
                         const Matrix& h, const Matrix& m,
                         const NoiseSpec& noise) {
  RiccatiStep step;
  step.p_minus = symmetrized(a * prev * a.transpose() +
                             g * noise.sigma_omega * g.transpose());
  step.s = symmetrized(h * step.p_minus * h.transpose() +
                       m * noise.sigma_nu * m.transpose());
  step.k = step.p_minus * h.transpose() * invert_innovation(step.s);
  const Matrix eye = Matrix::Identity(prev.rows(), prev.cols());
  step.p_plus = symmetrized((eye - step.k * h) * step.p_minus);
  return step;
}

std::vector<RiccatiStep> propagate_nominal_covariance(
    const NominalTrajectory& traj, const MotionModel& motion,
    const ObservationModel& obs, const NoiseSpec& noise, const Matrix& p0) {
  const int horizon = traj.horizon();
  if (static_cast<int>(traj.states.size()) != horizon + 1) {
    throw ConfigError("propagate_nominal_covariance: trajectory needs K+1 states");
  }
  std::vector<RiccatiStep> steps;
  steps.reserve(horizon);
  Matrix p = symmetrized(p0);
  for (int t = 1; t <= horizon; ++t) {
    const MotionJacobians mj =
        motion.jacobians(traj.states[t - 1], traj.controls[t - 1]);
    const ObservationJacobians oj = obs.jacobians(traj.states[t]);
    try {
      steps.push_back(riccati_step(p, mj.a, mj.g, oj.h, oj.m, noise));
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << "covariance recursion failed at t=" << t << ": " << e.what();
      throw NumericalError(msg.str());
    }
    p = steps.back().p_plus;
  }
  return steps;
}

Matrix psd_cholesky_factor(const Matrix& wx) {
  // Pivoted factorization W = P' L D L' P, so (sqrt(D) L' P)' (sqrt(D) L' P)
  // reconstructs W; PSD inputs with zero pivots are allowed.
  Eigen::LDLT<Matrix> ldlt(symmetrized(wx));
  Vector d = ldlt.vectorD();
  if (d.size() > 0 && d.minCoeff() < -1e-10) {
    throw NumericalError("psd_cholesky_factor: matrix is not PSD");
  }
  d = d.cwiseMax(0.0).cwiseSqrt();
  const int n = static_cast<int>(wx.rows());
  const Matrix pmat = ldlt.transpositionsP() * Matrix::Identity(n, n);
  const Matrix l = ldlt.matrixL();
  return d.asDiagonal() * l.transpose() * pmat;
}

CostWeights CostWeights::constant(const Matrix& wx, const Matrix& wu,
                                  int horizon) {
  CostWeights w;
  const Matrix chol = psd_cholesky_factor(wx);
  w.w_x.assign(horizon, symmetrized(wx));
  w.w_u.assign(horizon, symmetrized(wu));
  w.w_chol.assign(horizon, chol);
  return w;
}

Vector kf_mean_update(const Vector& mean, const Vector& control,
                      const Vector& observation, const KfLinearization& lin,
                      const Matrix& gain) {
  const Vector predicted = lin.a * mean + lin.b * control;
  const Matrix eye = Matrix::Identity(gain.rows(), gain.rows());
  return (eye - gain * lin.h) * lin.f_offset - gain * lin.h_offset + predicted +
         gain * (observation - lin.h * predicted);
}

ForwardRiccati forward_riccati_step(const Matrix& p, const Matrix& a,
                                    const Matrix& g, const Matrix& h,
                                    const Matrix& m, const NoiseSpec& noise) {
  const Matrix s = symmetrized(h * p * h.transpose() +
                               m * noise.sigma_nu * m.transpose());
  const Matrix s_inv = invert_innovation(s);
  ForwardRiccati out;
  out.gain = a * p * h.transpose() * s_inv;
  out.next_covariance = symmetrized(
      a *
      (p - p * h.transpose() * s_inv * h * p + g * noise.sigma_omega * g.transpose()) *
      a.transpose());
  return out;
}

namespace {

// D_KL(N(m1,S1) || N(m2,S2)).
double gaussian_kl(const Vector& m1, const Matrix& s1, const Vector& m2,
                   const Matrix& s2) {
  const int n = static_cast<int>(m1.size());
  Eigen::LLT<Matrix> llt1(symmetrized(s1));
  Eigen::LLT<Matrix> llt2(symmetrized(s2));
  if (llt1.info() != Eigen::Success || llt2.info() != Eigen::Success) {
    throw NumericalError("symmetric_kl_distance: covariance not positive definite");
  }
  const Vector dm = m2 - m1;
  const double trace = llt2.solve(s1).trace();
  const double maha = dm.dot(llt2.solve(dm));
  double logdet = 0.0;
  for (int i = 0; i < n; ++i) {
    logdet += 2.0 * (std::log(llt2.matrixL()(i, i)) - std::log(llt1.matrixL()(i, i)));
  }
  return 0.5 * (trace + maha - n + logdet);
}

}  // namespace

double symmetric_kl_distance(const GaussianBelief& b1,
                             const GaussianBelief& b2) {
  const double d =
      0.5 * (gaussian_kl(b1.mean, b1.covariance, b2.mean, b2.covariance) +
             gaussian_kl(b2.mean, b2.covariance, b1.mean, b1.covariance));
  return std::max(d, 0.0);
}

double goal_probability(const GaussianBelief& b, const Vector& goal,
                        double radius, int samples, std::uint64_t seed) {
  if (radius <= 0.0) {
    throw ConfigError("goal_probability: radius must be positive");
  }
  if (samples < 1) {
    throw ConfigError("goal_probability: samples must be >= 1");
  }
  const int pos_dim = std::min<int>(2, static_cast<int>(b.mean.size()));
  const Matrix pos_cov = b.covariance.topLeftCorner(pos_dim, pos_dim);
  const Vector pos_mean = b.mean.head(pos_dim);
  const Vector pos_goal = goal.head(pos_dim);

  CounterRng rng(seed);
  Matrix root;
  if (pos_cov.isZero(0.0)) {
    root = Matrix::Zero(pos_dim, pos_dim);
  } else {
    Eigen::LLT<Matrix> llt(symmetrized(pos_cov));
    root = llt.info() == Eigen::Success ? Matrix(llt.matrixL())
                                        : psd_sqrt(pos_cov);
  }
  int hits = 0;
  for (int i = 0; i < samples; ++i) {
    const Vector x = pos_mean + root * rng.normal_vector(pos_dim);
    if ((x - pos_goal).norm() < radius) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace tlqg
