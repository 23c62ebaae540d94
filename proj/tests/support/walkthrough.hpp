#pragma once

#include "fabopt/grid.hpp"

namespace fabopt::testing {

/// Reward array for the 6x8 walkthrough with a width-5 notched square.
inline RealGrid walkthrough_theta() {
  static constexpr double kValues[6][8] = {
      {0.6, 0.5, 0.5, -0.1, -0.5, -0.7, -0.5, -0.5},
      {0.5, 0.5, 0.5, 0.1, -0.5, -0.5, -0.5, -0.5},
      {0.5, 0.5, -0.5, -0.7, -0.1, -1.0, -0.5, -0.3},
      {-0.5, -0.5, -0.6, -0.5, -0.5, -0.5, -0.5, -0.5},
      {-0.5, -0.5, -0.5, -0.2, -0.5, -0.5, -0.6, -0.5},
      {-0.5, -0.4, -0.5, -0.5, -0.5, -0.5, -0.5, -0.5},
  };
  RealGrid theta(6, 8);
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 8; ++c) theta(r, c) = kValues[r][c];
  }
  return theta;
}

}  // namespace fabopt::testing
