#include <random>

#include "doctest.h"
#include "fabopt/generator.hpp"
#include "fabopt/morphology.hpp"

using namespace fabopt;

namespace {

Mask mask_from(const std::vector<std::string>& rows) {
  Mask m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()), 0);
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c] == '#';
  }
  return m;
}

BinaryGrid design_from(const std::vector<std::string>& rows) {
  return BinaryGrid::from_solid_mask(mask_from(rows));
}

Mask random_mask(int rows, int cols, std::mt19937_64& rng, double p = 0.5) {
  std::bernoulli_distribution coin(p);
  Mask m(rows, cols);
  for (auto& v : m.data()) v = coin(rng);
  return m;
}

bool subset(const Mask& a, const Mask& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && !b[i]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("brush footprints") {
  SUBCASE("degenerate circle") {
    const Brush b = make_brush(BrushShape::kCircular, 1);
    CHECK(b.pixel_count() == 1);
    CHECK(b.offsets()[0] == Offset{0, 0});
  }
  SUBCASE("notched square removes the four corners") {
    const Brush b = make_brush(BrushShape::kNotchedSquare, 13);
    CHECK(b.pixel_count() == 169 - 4);
    CHECK_FALSE(b.footprint()(0, 0));
    CHECK_FALSE(b.footprint()(12, 12));
    CHECK(b.footprint()(0, 1));
    CHECK(b.footprint()(1, 0));
    CHECK(make_brush(BrushShape::kNotchedSquare, 2).pixel_count() == 4);
    CHECK(make_brush(BrushShape::kNotchedSquare, 3).pixel_count() == 5);
  }
  SUBCASE("circle of diameter 13 by enumeration of pixel centers") {
    const Brush b = make_brush(BrushShape::kCircular, 13);
    int expected = 0;
    for (int i = 0; i < 13; ++i) {
      for (int j = 0; j < 13; ++j) expected += (i - 6) * (i - 6) + (j - 6) * (j - 6) <= 42;
    }
    CHECK(expected == 137);
    CHECK(b.pixel_count() == 137);
    // Top row spans five pixels, widest rows span all thirteen.
    int top = 0;
    for (int c = 0; c < 13; ++c) top += b.footprint()(0, c);
    CHECK(top == 5);
    CHECK(b.symmetric());
    CHECK(b.extent() == 6);
  }
  SUBCASE("even sizes are not point symmetric about the anchor") {
    const Brush b = make_brush(BrushShape::kCircular, 4);
    CHECK(b.pixel_count() == 12);
    CHECK_FALSE(b.symmetric());
    CHECK(b.reflected().reflected().offsets() == b.offsets());
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(make_brush(BrushShape::kCircular, 0), std::invalid_argument);
    CHECK_THROWS_AS(parse_brush("square:3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_brush("circle"), std::invalid_argument);
    CHECK_THROWS_AS(parse_brush("circle:x"), std::invalid_argument);
  }
  SUBCASE("spec strings") {
    CHECK(parse_brush("circle:13").spec() == "circle:13");
    CHECK(parse_brush("notched:10").shape() == BrushShape::kNotchedSquare);
    CHECK(parse_brush("notched_square:5").size() == 5);
  }
}

TEST_CASE("design rule to brush width") {
  CHECK(brush_width_for_rule(80, 10) == 10);
  CHECK(brush_width_for_rule(10, 10) == 3);
  CHECK(brush_width_for_rule(60, 20) == 5);
  CHECK_THROWS_AS(brush_width_for_rule(85, 10), std::invalid_argument);
  CHECK_THROWS_AS(brush_width_for_rule(0, 10), std::invalid_argument);
}

TEST_CASE("dilation and erosion examples") {
  const Brush square = make_brush(BrushShape::kCircular, 3);  // full 3x3
  REQUIRE(square.pixel_count() == 9);

  Mask dot(5, 5, 0);
  dot(2, 2) = 1;
  CHECK(dilate(dot, square) == mask_from({".....", ".###.", ".###.", ".###.", "....."}));
  CHECK(dilate(Mask(5, 5, 0), square) == Mask(5, 5, 0));

  const Mask block = mask_from({".....", ".###.", ".###.", ".###.", "....."});
  CHECK(erode(block, square) == dot);
  CHECK(erode(Mask(4, 6, 1), square) == Mask(4, 6, 1));

  // A block flush with the corner keeps its edge pixels: the overhang is unconstrained.
  const Mask corner = mask_from({"###..", "###..", "###..", ".....", "....."});
  CHECK(erode(corner, square) == mask_from({"##...", "##...", ".....", ".....", "....."}));
}

TEST_CASE("rectangle dilated by a circle grows rounded corners") {
  const Brush b = make_brush(BrushShape::kCircular, 5);
  Mask rect(15, 15, 0);
  for (int r = 5; r < 10; ++r) {
    for (int c = 4; c < 11; ++c) rect(r, c) = 1;
  }
  const Mask grown = dilate(rect, b);
  // Straight sides move out by the brush radius, corners are cut.
  CHECK(grown(3, 7));
  CHECK(grown(7, 2));
  CHECK_FALSE(grown(3, 2));
  CHECK(erode(grown, b) == rect);
}

TEST_CASE("opening") {
  const Brush square = make_brush(BrushShape::kCircular, 3);
  Mask dot(9, 9, 0);
  dot(4, 4) = 1;
  CHECK(open(dot, square) == Mask(9, 9, 0));

  const Mask feasible = mask_from({"#####....", "#####....", "#####....", "...######",
                                   "...######", "...######", ".........", ".........",
                                   "........."});
  CHECK(open(feasible, square) == feasible);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Mask g = random_mask(12, 10, rng, 0.6);
    const Brush b = make_brush(trial % 2 ? BrushShape::kNotchedSquare : BrushShape::kCircular,
                               2 + trial % 4);
    const Mask once = open(g, b);
    CHECK(open(once, b) == once);
    CHECK(subset(once, g));
  }
}

TEST_CASE("duality of erosion and dilation over all 3x3 grids") {
  for (int size : {2, 3}) {
    for (auto shape : {BrushShape::kCircular, BrushShape::kNotchedSquare}) {
      const Brush b = make_brush(shape, size);
      for (int bits = 0; bits < 512; ++bits) {
        Mask g(3, 3);
        for (int i = 0; i < 9; ++i) g[i] = (bits >> i) & 1;
        // Pixels under the brush at p are p + o; the complement dilation
        // reaches p - o, hence the reflected brush.
        CHECK(erode(g, b) == logical_not(dilate(logical_not(g), b.reflected())));
        CHECK(subset(g, dilate(g, b)));
        CHECK(subset(open(g, b), g));
      }
    }
  }
}

TEST_CASE("feasibility") {
  const Brush square = make_brush(BrushShape::kCircular, 3);
  CHECK(is_feasible(BinaryGrid(7, 7, BinaryGrid::kSolid), square));
  CHECK(is_feasible(BinaryGrid(7, 7, BinaryGrid::kVoid), square));

  BinaryGrid dot(9, 9, BinaryGrid::kVoid);
  dot.set(4, 4, BinaryGrid::kSolid);
  CHECK_FALSE(is_feasible(dot, square));
  CHECK(is_feasible(dot, make_brush(BrushShape::kCircular, 1)));

  // A single void pixel is just as infeasible.
  CHECK_FALSE(is_feasible(dot.negated(), square));

  const BinaryGrid two_blocks = design_from({"###....", "###....", "###....", ".......",
                                             "....###", "....###", "....###"});
  CHECK(is_feasible(two_blocks, square));
  // Restating the condition: opening the solid phase gives it back.
  CHECK(open(two_blocks.solid_mask(), square) == two_blocks.solid_mask());
}

TEST_CASE("fixed border frames constrain edge features") {
  const Brush square = make_brush(BrushShape::kCircular, 3);
  const int margin = 2;
  // A one-pixel-wide solid column against the left edge, continued by a
  // solid stub in the frame.
  BinaryGrid design(6, 6, BinaryGrid::kVoid);
  for (int r = 2; r <= 4; ++r) design.set(r, 0, BinaryGrid::kSolid);

  Grid<std::int8_t> frame(6 + 2 * margin, 6 + 2 * margin, 0);
  for (int r = 2; r <= 4; ++r) {
    for (int c = 0; c < margin; ++c) frame(r + margin, c) = 1;
  }
  const auto border = BorderMode::fixed(frame, margin);
  CHECK_FALSE(is_feasible(design, square));
  CHECK(is_feasible(design, square, border));

  // A void frame pixel next to the column makes the same design infeasible.
  Grid<std::int8_t> blocked = frame;
  blocked(3 + margin, 1) = -1;
  CHECK_FALSE(is_feasible(design, square, BorderMode::fixed(blocked, margin)));

  CHECK_THROWS_AS(is_feasible(BinaryGrid(5, 5), square, border), std::invalid_argument);
}

TEST_CASE("minimum length scale") {
  CHECK(minimum_length_scale(BinaryGrid(9, 12, BinaryGrid::kSolid), BrushShape::kCircular) == 9);

  BinaryGrid checker(8, 8);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) checker.set(r, c, (r + c) % 2 ? BinaryGrid::kSolid : BinaryGrid::kVoid);
  }
  CHECK(minimum_length_scale(checker, BrushShape::kCircular) == 1);
  CHECK(minimum_length_scale(checker, BrushShape::kNotchedSquare) == 1);

  const BinaryGrid d = random_feasible(make_brush(BrushShape::kCircular, 6), 40, 40, 3);
  CHECK(minimum_length_scale(d, BrushShape::kCircular) >= 6);
}

TEST_CASE("feasibility nests when the larger brush is open under the smaller one") {
  // If b_L is itself a union of b_{L-1} placements, every b_L-feasible
  // design is b_{L-1}-feasible. The circular rule breaks this at L = 4:
  // the size-3 circle is a full 3x3 square, which the 12-pixel size-4
  // circle cannot contain.
  auto contains_openly = [](const Brush& big, const Brush& small) {
    const int pad = big.size() + 2;
    Mask m(big.size() + 2 * pad, big.size() + 2 * pad, 0);
    for (const auto& o : big.offsets()) m(pad + big.anchor_row() + o.dr, pad + big.anchor_col() + o.dc) = 1;
    return open(m, small) == m;
  };
  CHECK_FALSE(contains_openly(make_brush(BrushShape::kCircular, 4),
                              make_brush(BrushShape::kCircular, 3)));
  const BinaryGrid four = random_feasible(make_brush(BrushShape::kCircular, 4), 40, 40, 0);
  CHECK_FALSE(is_feasible(four, make_brush(BrushShape::kCircular, 3)));
  CHECK(minimum_length_scale(four, BrushShape::kCircular) >= 4);

  for (auto shape : {BrushShape::kCircular, BrushShape::kNotchedSquare}) {
    for (int size = 2; size <= 9; ++size) {
      const Brush big = make_brush(shape, size);
      const Brush small = make_brush(shape, size - 1);
      if (!contains_openly(big, small)) continue;
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const BinaryGrid d = random_feasible(big, 32, 32, seed);
        CHECK(is_feasible(d, small));
      }
    }
  }
}

TEST_CASE("run length statistics") {
  const BinaryGrid d = design_from({"........", "..###...", "..###...", "........"});
  const auto stats = run_length_stats(d);
  CHECK(stats.min_solid_run == 2);  // vertical runs of the block
  CHECK(stats.void_runs == 0);      // every void run reaches the edge
  const auto holes = run_length_stats(design_from({"#######", "#..####", "#######"}));
  CHECK(holes.min_void_run == 1);  // the vertical run through the hole
  const auto full = run_length_stats(BinaryGrid(4, 4, BinaryGrid::kSolid));
  CHECK(full.solid_runs == 0);
  CHECK(full.min_solid_run == 0);
}
