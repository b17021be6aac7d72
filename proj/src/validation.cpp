#include "tlqg/validation.hpp"

#include <algorithm>
#include <sstream>

namespace tlqg {

namespace {

double max_abs(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

}  // namespace

std::string ValidationReport::summary() const {
  std::ostringstream out;
  out << "lemma1 (estimation error)  max residual " << lemma1_max << '\n'
      << "lemma2 (state error)       max residual " << lemma2_max << '\n'
      << "lemma3 (control error)     max residual " << lemma3_max << '\n'
      << "lemma4 (observation error) max residual " << lemma4_max << '\n'
      << "lemma5 (belief error)      max residual " << lemma5_max << '\n'
      << "theorem1 mean " << theorem1.mean << " (4 x standard error "
      << 4.0 * theorem1.standard_error << ")\n"
      << (passed ? "PASS" : "FAIL") << '\n';
  return out.str();
}

ValidationReport run_validation(const ValidationOptions& options) {
  ValidationReport report;
  CounterRng rng(CounterRng::derive(options.seed, 7));

  const Matrix wx2 = Matrix::Identity(2, 2);
  const Matrix wu1 = Matrix::Identity(1, 1);
  for (int i = 0; i < options.systems; ++i) {
    LtvSystem sys = make_random_ltv(2, 1, 2, 5, wx2, wu1, rng);
    if (options.inject_gain_error) {
      sys.lqr_gains[1].array() += 0.25;  // recursion runs with the bad gain...
    }
    for (int j = 0; j < options.realizations; ++j) {
      const ErrorRealization real = sample_realization(sys, rng);
      LtvSystem closed_form_sys = sys;
      if (options.inject_gain_error) {
        closed_form_sys.lqr_gains[1].array() -= 0.25;  // ...the closed form not
      }
      const ErrorSequences seq = recursive_errors(sys, real);
      for (int t = -1; t < sys.horizon; ++t) {
        report.lemma1_max = std::max(
            report.lemma1_max,
            max_abs(lemma1_estimation_error(closed_form_sys, real, t) -
                    seq.estimation_error[t + 1]));
        report.lemma2_max = std::max(
            report.lemma2_max,
            max_abs(lemma2_state_error(closed_form_sys, real, t) -
                    seq.state_error[t + 1]));
      }
      for (int t = -1; t < sys.horizon - 1; ++t) {
        report.lemma3_max = std::max(
            report.lemma3_max,
            max_abs(lemma3_control_error(closed_form_sys, real, t) -
                    seq.control_error[t + 1]));
      }
      for (int t = 0; t < sys.horizon; ++t) {
        report.lemma4_max = std::max(
            report.lemma4_max,
            max_abs(lemma4_observation_error(closed_form_sys, real, t) -
                    seq.observation_error[t + 1]));
      }
    }
  }

  const Matrix wx1 = Matrix::Identity(1, 1);
  for (int i = 0; i < options.lemma5_systems; ++i) {
    const LtvSystem sys = make_random_ltv(1, 1, 1, 3, wx1, wu1, rng);
    const BeliefJacobians jac = belief_jacobians_fd(sys);
    for (int j = 0; j < 10; ++j) {
      const ErrorRealization real = sample_realization(sys, rng);
      const std::vector<Vector> oracle =
          recursive_belief_errors(sys, real, jac);
      for (int t = 0; t <= sys.horizon; ++t) {
        report.lemma5_max = std::max(
            report.lemma5_max,
            max_abs(lemma5_belief_error(sys, real, t, jac) - oracle[t]));
      }
    }
  }

  {
    const LtvSystem sys = make_random_ltv(1, 1, 1, 5, wx1, wu1, rng);
    std::vector<Vector> cost_b(sys.horizon + 1);
    std::vector<Vector> cost_u(sys.horizon);
    const int dim = belief_dim(sys.nx);
    for (int t = 0; t <= sys.horizon; ++t) {
      cost_b[t] = Vector(dim);
      for (int k = 0; k < dim; ++k) {
        cost_b[t][k] = 2.0 * rng.uniform() - 1.0;
      }
    }
    for (int t = 0; t < sys.horizon; ++t) {
      cost_u[t] = Vector(sys.nu);
      for (int k = 0; k < sys.nu; ++k) {
        cost_u[t][k] = 2.0 * rng.uniform() - 1.0;
      }
    }
    report.theorem1 = theorem1_cost_error_check(
        sys, cost_b, cost_u, options.theorem1_samples,
        CounterRng::derive(options.seed, 11));
  }

  report.lemmas_pass = report.lemma1_max <= 1e-10 &&
                       report.lemma2_max <= 1e-10 &&
                       report.lemma3_max <= 1e-10 && report.lemma4_max <= 1e-10;
  report.lemma5_pass = report.lemma5_max <= 1e-8;
  report.theorem1_pass =
      std::abs(report.theorem1.mean) <= 4.0 * report.theorem1.standard_error;
  report.passed =
      report.lemmas_pass && report.lemma5_pass && report.theorem1_pass;
  return report;
}

}  // namespace tlqg
