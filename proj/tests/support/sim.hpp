#pragma once

#include <cmath>
#include <random>

#include "fabopt/problems.hpp"

namespace fabopt::testing {

/// Small bend used for gradient checks: 0.8 um square at 20 nm pitch, so the
/// design is 40x40 pixels. One wavelength per band keeps it quick.
inline ProblemGeometry small_bend() {
  ProblemGeometry g = standard_geometry("bend");
  g.name = "small_bend";
  g.design_x_um = g.design_y_um = 0.8;
  g.spec = g.spec.centers_only();
  return g;
}

/// 2.0 x 1.2 um design holding a straight 400 nm guide between a left and a
/// right port.
struct StraightGuide {
  ProblemDefinition problem;
  BinaryGrid design;
  explicit StraightGuide(double pitch_nm)
      : problem(
            [] {
              ProblemGeometry g;
              g.name = "straight";
              g.design_x_um = 2.0;
              g.design_y_um = 1.2;
              g.ports = {{Side::kLeft, 0.0, 1}, {Side::kRight, 0.0, 1}};
              g.spec = benchmark_spec("bend");
              return g;
            }(),
            pitch_nm),
        design(problem.design_rows(), problem.design_cols(), BinaryGrid::kVoid) {
    const int w = static_cast<int>(std::lround(0.4 / problem.pitch_um()));
    const int lo = (problem.design_cols() - w) / 2;
    for (int i = 0; i < design.rows(); ++i) {
      for (int j = lo; j < lo + w; ++j) design.set(i, j, BinaryGrid::kSolid);
    }
  }
};

inline BinaryGrid random_binary(int rows, int cols, std::uint64_t seed, double p_solid = 0.5) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p_solid);
  BinaryGrid x(rows, cols, BinaryGrid::kVoid);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) x.set(r, c, coin(rng) ? BinaryGrid::kSolid : BinaryGrid::kVoid);
  }
  return x;
}

/// Spec loss of an arbitrary permittivity domain, assembled straight from
/// the port solutions (independent of evaluate()).
inline double domain_loss(const ProblemDefinition& problem, const fdfd::Domain& dom) {
  SVector s;
  for (double wl : problem.spec().wavelengths_nm()) {
    const fdfd::ScatteringProblem sim(dom, problem.ports(), wl / 1000.0);
    const auto sol = sim.solve({0});
    for (std::size_t q = 0; q < problem.ports().size(); ++q) {
      s.push_back({static_cast<int>(q) + 1, 1, wl, sol.s[0][q]});
    }
  }
  return scattering_loss(s, problem.spec());
}

/// Fourth-order central difference of the loss with respect to the
/// permittivity of design pixel (i, j), scaled to the +-1 pixel variable.
inline double pixel_fd(const ProblemDefinition& problem, const BinaryGrid& x, int i, int j,
                       double h = 1e-3) {
  const fdfd::Domain base = problem.domain(x);
  auto at = [&](double k) {
    fdfd::Domain d = base;
    d.eps(problem.design_x0() + i, problem.design_y0() + j) += k * h;
    return domain_loss(problem, d);
  };
  const double de = (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h);
  return kPermittivityPerPixel * de;
}

}  // namespace fabopt::testing
