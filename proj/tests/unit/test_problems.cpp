#include <stdexcept>

#include "doctest.h"
#include "fabopt/problems.hpp"

using namespace fabopt;

TEST_CASE("benchmark grids at each pitch") {
  struct Case {
    const char* name;
    double pitch;
    int rows, cols;
  };
  for (const Case c : {Case{"bend", 10, 160, 160}, Case{"bend", 20, 80, 80}, Case{"mode_converter", 10, 160, 160},
                       Case{"beamsplitter", 10, 320, 200}, Case{"demultiplexer", 20, 320, 320}}) {
    CAPTURE(c.name);
    const auto p = standard_problem(c.name, c.pitch);
    CHECK(p.design_rows() == c.rows);
    CHECK(p.design_cols() == c.cols);
    CHECK(p.ports().size() == standard_geometry(c.name).ports.size());
    CHECK(p.background().nx() == c.rows + 2 * p.design_x0());
  }
}

TEST_CASE("invalid problems are rejected") {
  CHECK_THROWS_AS(standard_problem("bend", 30.0), std::invalid_argument);
  CHECK_THROWS_AS(standard_problem("bend", 0.0), std::invalid_argument);
  CHECK_THROWS_AS(standard_problem("wiggle", 10.0), std::invalid_argument);
  auto g = standard_geometry("bend");
  g.design_y_um = 2.0;
  CHECK_THROWS_AS(ProblemDefinition(g, 20.0), std::invalid_argument);  // diagonal needs square
  g = standard_geometry("bend");
  g.ports[0].offset_um = 0.7;
  CHECK_THROWS_AS(ProblemDefinition(g, 20.0), std::invalid_argument);
}

TEST_CASE("design insertion and waveguide stubs") {
  const auto p = standard_problem("bend", 20.0);
  BinaryGrid x(80, 80, BinaryGrid::kVoid);
  x.set(3, 7, BinaryGrid::kSolid);
  const auto d = p.domain(x);
  CHECK(d.eps(p.design_x0() + 3, p.design_y0() + 7) == fdfd::kSilicon);
  CHECK(d.eps(p.design_x0() + 4, p.design_y0() + 7) == fdfd::kOxide);
  // Left guide spans columns 30..49 of the design and reaches the domain edge.
  for (int a : {0, p.design_x0() - 1}) {
    CHECK(d.eps(a, p.design_y0() + 30) == fdfd::kSilicon);
    CHECK(d.eps(a, p.design_y0() + 49) == fdfd::kSilicon);
    CHECK(d.eps(a, p.design_y0() + 29) == fdfd::kOxide);
    CHECK(d.eps(a, p.design_y0() + 50) == fdfd::kOxide);
  }
  // Nothing on the right or top sides.
  CHECK(d.eps(p.design_x0() + 80, p.design_y0() + 40) == fdfd::kOxide);
  CHECK(d.eps(p.design_x0() + 40, p.design_y0() + 80) == fdfd::kOxide);
  CHECK_THROWS_AS(p.domain(BinaryGrid(80, 79, BinaryGrid::kVoid)), std::invalid_argument);
}

TEST_CASE("generator border frame follows the stubs") {
  const auto p = standard_problem("bend", 20.0);
  const int m = 3;
  const BorderMode b = p.border(m);
  REQUIRE(b.margin() == m);
  const auto& f = b.frame();
  CHECK(f.rows() == 80 + 2 * m);
  CHECK(f(0, m + 30) == 1);
  CHECK(f(0, m + 49) == 1);
  CHECK(f(0, m + 29) == -1);
  CHECK(f(m + 30, 0) == 1);
  CHECK(f(m + 80, m + 40) == -1);
  CHECK(f(m + 40, m + 80) == -1);
  CHECK_THROWS_AS(p.border(0), std::invalid_argument);
}

TEST_CASE("port planes and windows") {
  const auto p = standard_problem("beamsplitter", 20.0);
  const auto& ports = p.ports();
  REQUIRE(ports.size() == 4);
  CHECK(ports[0].axis == fdfd::Axis::kX);
  CHECK(ports[0].outward == -1);
  CHECK(ports[1].outward == 1);
  CHECK(ports[0].plane == p.design_x0() - 25);
  CHECK(ports[1].plane == p.design_x0() + 160 - 1 + 25);
  // Port 1 sits 0.6 um above centre, port 4 as far below.
  CHECK(ports[0].lo - ports[3].lo == 60);
  CHECK(ports[0].hi - ports[0].lo == ports[3].hi - ports[3].lo);
  CHECK(ports[0].lo == ports[1].lo);
}

TEST_CASE("geometry JSON round trip") {
  for (const auto& name : standard_problem_names()) {
    CAPTURE(name);
    const auto g = standard_geometry(name);
    const auto j = to_json(g);
    const auto back = geometry_from_json(nlohmann::json::parse(j.dump()));
    CHECK(to_json(back) == j);
    CHECK(back.ports.size() == g.ports.size());
    CHECK(back.symmetry.size() == g.symmetry.size());
  }
  CHECK_THROWS(geometry_from_json(nlohmann::json::parse(R"({"design_um":[1.6],"ports":[]})")));
  CHECK_THROWS(parse_symmetry("rotate"));
}
