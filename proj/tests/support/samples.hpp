#pragma once

#include <optional>
#include <random>
#include <utility>

#include "fabopt/grid.hpp"
#include "fabopt/morphology.hpp"

namespace fabopt::testing {

/// Builds a design from random solid brush placements, then alternately opens
/// the void and solid phases until both are unions of placements. When the
/// alternation stalls, void pixels no void placement can cover get a solid
/// placement centered on them; solid only grows, so this terminates.
inline std::optional<BinaryGrid> feasible_from_placements(int rows, int cols, const Brush& b,
                                                          std::mt19937_64& rng,
                                                          double density = 0.01) {
  std::bernoulli_distribution coin(density);
  Mask touches(rows, cols);
  for (auto& v : touches.data()) v = coin(rng);
  Mask solid = dilate(touches, b);
  for (int iter = 0; iter < 4 * (rows + cols); ++iter) {
    const BinaryGrid x = BinaryGrid::from_solid_mask(solid);
    if (is_feasible(x, b)) return x;
    const Mask vacant = open(logical_not(solid), b);
    Mask next = open(logical_not(vacant), b);
    if (next == solid) {
      const Mask stranded = logical_and(logical_not(vacant), logical_not(solid));
      next = logical_or(solid, dilate(stranded, b));
    }
    solid = std::move(next);
  }
  return std::nullopt;
}

/// Brute-force width/spacing oracle: every maximal horizontal or vertical run
/// of either phase that lies strictly inside the grid is at least `min_run`
/// pixels long.
inline bool runs_at_least(const BinaryGrid& x, int min_run) {
  for (int r = 0; r < x.rows(); ++r) {
    int c = 0;
    while (c < x.cols()) {
      int e = c;
      while (e + 1 < x.cols() && x(r, e + 1) == x(r, c)) ++e;
      if (c > 0 && e < x.cols() - 1 && e - c + 1 < min_run) return false;
      c = e + 1;
    }
  }
  for (int c = 0; c < x.cols(); ++c) {
    int r = 0;
    while (r < x.rows()) {
      int e = r;
      while (e + 1 < x.rows() && x(e + 1, c) == x(r, c)) ++e;
      if (r > 0 && e < x.rows() - 1 && e - r + 1 < min_run) return false;
      r = e + 1;
    }
  }
  return true;
}

}  // namespace fabopt::testing
