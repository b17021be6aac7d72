#pragma once

#include <cstdint>
#include <string>

#include "tlqg/error_analysis.hpp"

namespace tlqg {

struct ValidationOptions {
  std::uint64_t seed = 1;
  int systems = 100;            // random LTV systems for lemmas 1-4
  int realizations = 100;       // realizations per system
  int lemma5_systems = 5;       // scalar K=3 systems for lemma 5
  int theorem1_samples = 100000;
  bool inject_gain_error = false;  // negative-control mode for tests
};

struct ValidationReport {
  double lemma1_max = 0.0;
  double lemma2_max = 0.0;
  double lemma3_max = 0.0;
  double lemma4_max = 0.0;
  double lemma5_max = 0.0;
  Theorem1Result theorem1;
  bool lemmas_pass = false;    // lemmas 1-4 within 1e-10
  bool lemma5_pass = false;    // within 1e-8
  bool theorem1_pass = false;  // |mean| <= 4 SE
  bool passed = false;

  std::string summary() const;
};

ValidationReport run_validation(const ValidationOptions& options);

}  // namespace tlqg
