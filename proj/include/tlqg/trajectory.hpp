#pragma once

#include <vector>

#include "tlqg/common.hpp"

namespace tlqg {

// Nominal (noiseless) trajectory: K+1 states, K controls.
struct NominalTrajectory {
  std::vector<Vector> states;
  std::vector<Vector> controls;

  int horizon() const { return static_cast<int>(controls.size()); }
};

}  // namespace tlqg
