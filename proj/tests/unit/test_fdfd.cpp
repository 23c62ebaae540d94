#include <cmath>
#include <numbers>

#include "../support/sim.hpp"
#include "doctest.h"
#include "fabopt/fdfd.hpp"

using namespace fabopt;
using namespace fabopt::fdfd;

namespace {

std::vector<double> slab(double pitch_um, double core_um, double clad_um) {
  const int core = static_cast<int>(std::lround(core_um / pitch_um));
  const int clad = static_cast<int>(std::lround(clad_um / pitch_um));
  std::vector<double> line(2 * clad + core, kOxide);
  for (int i = clad; i < clad + core; ++i) line[i] = kSilicon;
  return line;
}

int sign_changes(const std::vector<double>& v, double floor) {
  int changes = 0;
  double last = 0.0;
  for (double x : v) {
    if (std::abs(x) < floor) continue;
    if (last != 0.0 && (x > 0) != (last > 0)) ++changes;
    last = x;
  }
  return changes;
}

}  // namespace

TEST_CASE("waveguide modes") {
  const auto line = slab(0.01, 0.4, 0.8);
  const Mode m1 = waveguide_mode(line, 1.28, 0.01, 1);
  const Mode m2 = waveguide_mode(line, 1.28, 0.01, 2);
  const int n = static_cast<int>(line.size());
  double norm = 0.0;
  for (int i = 0; i < n; ++i) {
    CHECK(m1.profile[i] == doctest::Approx(m1.profile[n - 1 - i]).epsilon(1e-8));
    CHECK(m2.profile[i] == doctest::Approx(-m2.profile[n - 1 - i]).epsilon(1e-8));
    norm += m1.profile[i] * m1.profile[i];
  }
  CHECK(norm == doctest::Approx(1.0));
  CHECK(sign_changes(m1.profile, 1e-6) == 0);
  CHECK(sign_changes(m2.profile, 1e-6) == 1);
  for (const Mode* m : {&m1, &m2}) {
    CHECK(m->n_eff > std::sqrt(kOxide));
    CHECK(m->n_eff < std::sqrt(kSilicon));
  }
  CHECK(m1.n_eff > m2.n_eff);
  CHECK_THROWS_AS(waveguide_mode(line, 1.28, 0.01, 6), NoSuchMode);
  CHECK_THROWS_AS(waveguide_mode(std::vector<double>(50, kOxide), 1.28, 0.01, 1), NoSuchMode);
}

TEST_CASE("point source in a uniform medium") {
  Domain d;
  d.pitch_um = 0.02;
  d.eps = RealGrid(91, 81, kOxide);
  const Solver solver(d, 1.3);
  Field j = Field::Zero(91 * 81);
  j(solver.index(45, 40)) = 1.0;
  const Field e = solver.solve(j);
  CHECK(solver.residual(e, j) < 1e-8);
  // Outgoing cylindrical wave: symmetric about the source.
  CHECK(std::abs(e(solver.index(50, 40)) - e(solver.index(40, 40))) < 1e-9 * std::abs(e(solver.index(50, 40))));
  CHECK(std::abs(e(solver.index(45, 45)) - e(solver.index(45, 35))) < 1e-9 * std::abs(e(solver.index(45, 45))));
}

TEST_CASE("straight waveguide transmits") {
  for (double pitch : {10.0, 20.0}) {
    CAPTURE(pitch);
    const testing::StraightGuide st(pitch);
    const ScatteringProblem sim(st.problem.domain(st.design), st.problem.ports(), 1.28);
    const auto sol = sim.solve({0, 1});
    CHECK(std::norm(sol.s[0][1]) > 0.99);
    CHECK(std::norm(sol.s[0][0]) < 1e-3);
    CHECK(std::abs(sol.s[0][1] - sol.s[1][0]) < 1e-3);
    CHECK(sim.solver().residual(sol.fields[0], sim.source(0)) < 1e-8);
  }
}

TEST_CASE("transmission converges under refinement") {
  auto loss_of = [](double pitch) {
    const testing::StraightGuide st(pitch);
    const ScatteringProblem sim(st.problem.domain(st.design), st.problem.ports(), 1.28);
    return std::abs(1.0 - std::norm(sim.solve({0}).s[0][1]));
  };
  const double coarse = loss_of(50.0), fine = loss_of(20.0);
  CHECK(fine < 1e-3);
  CHECK(fine <= coarse + 1e-6);
}

TEST_CASE("odd output mode is orthogonal to the even input") {
  ProblemGeometry g = standard_geometry("mode_converter");
  const ProblemDefinition p(g, 20.0);
  BinaryGrid x(p.design_rows(), p.design_cols(), BinaryGrid::kVoid);
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 30; j < 50; ++j) x.set(i, j, BinaryGrid::kSolid);
  }
  const ScatteringProblem sim(p.domain(x), p.ports(), 1.27);
  const auto sol = sim.solve({0});
  CHECK(std::norm(sol.s[0][1]) < 1e-6);
}

TEST_CASE("random structures are reciprocal and passive") {
  const ProblemDefinition p(testing::small_bend(), 20.0);
  const auto x = testing::random_binary(40, 40, 3);
  const ScatteringProblem sim(p.domain(x), p.ports(), 1.29);
  const auto sol = sim.solve({0, 1});
  CHECK(std::abs(sol.s[0][1] - sol.s[1][0]) < 1e-3 * std::max(1.0, std::abs(sol.s[0][1])));
  for (const auto& row : sol.s) {
    double total = 0.0;
    for (auto v : row) total += std::norm(v);
    CHECK(total <= 1.0 + 1e-2);
  }
}

TEST_CASE("zero loss sensitivity gives a zero gradient") {
  const ProblemDefinition p(testing::small_bend(), 20.0);
  const auto x = testing::random_binary(40, 40, 4);
  const ScatteringProblem sim(p.domain(x), p.ports(), 1.27);
  const auto sol = sim.solve({0});
  const RealGrid g = sim.permittivity_gradient(sol, {{Complex(0), Complex(0)}});
  for (double v : g.data()) CHECK(v == 0.0);
}

TEST_CASE("adjoint gradient matches finite differences") {
  const ProblemDefinition p(testing::small_bend(), 20.0);
  const auto x = testing::random_binary(40, 40, 5);
  const Evaluation ev = evaluate(p, x, true);
  CHECK(ev.loss == doctest::Approx(testing::domain_loss(p, p.domain(x))).epsilon(1e-12));
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> pick(0, 39);
  for (int n = 0; n < 4; ++n) {
    const int i = pick(rng), j = pick(rng);
    const double fd = testing::pixel_fd(p, x, i, j);
    CAPTURE(i);
    CAPTURE(j);
    CHECK(std::abs(ev.gradient(i, j) - fd) <= 1e-4 * std::abs(fd));
  }
}

TEST_CASE("transmission gradient of a symmetric bend is symmetric") {
  // By reciprocity dS21/d eps is the product of the fields launched from
  // ports 1 and 2, which the diagonal mirror swaps. Symmetry is approximate
  // because the monitor is a single sheet while the source is a pair; the
  // two launched fields agree only to ~2e-4 inside the design.
  auto g = testing::small_bend();
  std::erase_if(g.spec.entries, [](const SpecEntry& e) { return e.out_port != 2; });
  const ProblemDefinition p(g, 20.0);
  const auto r = testing::random_binary(40, 40, 6);
  BinaryGrid x = r;
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < i; ++j) x.set(i, j, r(j, i));
  }
  const Evaluation ev = evaluate(p, x, true);
  double scale = 0.0;
  for (double v : ev.gradient.data()) scale = std::max(scale, std::abs(v));
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < i; ++j) CHECK(std::abs(ev.gradient(i, j) - ev.gradient(j, i)) < 1e-3 * scale);
  }
}
