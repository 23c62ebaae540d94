// Step-by-step walkthrough of a 6x8 design with a width-5 notched square.
// Rows are lettered A-F, columns numbered 0-7; "C4" is row 2, column 4.

#include <set>
#include <string>

#include "../support/walkthrough.hpp"
#include "doctest.h"
#include "fabopt/generator.hpp"

using namespace fabopt;

namespace {

using Labels = std::set<std::string>;

std::string label(int r, int c) { return std::string(1, static_cast<char>('A' + r)) + std::to_string(c); }

Labels labels(const Mask& m) {
  Labels out;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (m(r, c)) out.insert(label(r, c));
    }
  }
  return out;
}

Labels labels(const std::vector<Touch>& ts, Phase p) {
  Labels out;
  for (const auto& t : ts) {
    if (t.phase == p) out.insert(label(t.row, t.col));
  }
  return out;
}

void walk(UpdateMode update) {
  const Brush b = make_brush(BrushShape::kNotchedSquare, 5);
  GeneratorOptions opts;
  opts.update = update;
  Generator g(testing::walkthrough_theta(), b, BorderMode::padded(), opts);
  REQUIRE(g.margin() == 0);
  constexpr Phase kS = Phase::kSolid, kV = Phase::kVoid;

  // Pictured step n corresponds to generator iteration n - 1.
  auto single = [&](StepKind kind, Phase p, const char* where) {
    const auto rec = g.step();
    CHECK(rec.kind == kind);
    REQUIRE(rec.touches.size() == 1);
    CHECK(rec.touches[0].phase == p);
    CHECK(label(rec.touches[0].row, rec.touches[0].col) == where);
    return g.states();
  };
  auto take_free = [&](const Labels& solid, const Labels& vacant) {
    const auto rec = g.step();
    CHECK(rec.kind == StepKind::kFree);
    CHECK(labels(rec.touches, kS) == solid);
    CHECK(labels(rec.touches, kV) == vacant);
    return g.states();
  };

  // Step 1: everything valid and possible.
  auto s = g.states();
  CHECK(count(s[kS].valid) == 48);
  CHECK(count(s[kV].valid) == 48);

  // Step 2: void at A6 makes A7 a free void touch.
  s = single(StepKind::kValid, kV, "A6");
  CHECK(labels(s[kV].free) == Labels{"A7"});
  CHECK(labels(s[kS].free).empty());

  // Step 3: taking A7 changes no pixel.
  const auto before = g.pixels();
  s = take_free({}, {"A7"});
  CHECK(g.pixels() == before);

  // Step 4: solid at A0.
  s = single(StepKind::kValid, kS, "A0");
  CHECK(count(s[kS].free) + count(s[kV].free) == 0);

  // Step 5: void at E6 leaves C4 required for void; resolving-only touches
  // sit in columns 3-5, free touches in columns 6-7.
  s = single(StepKind::kValid, kV, "E6");
  CHECK(labels(s[kV].required) == Labels{"C4"});
  std::set<int> resolving_cols, free_cols;
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 8; ++c) {
      if (s[kV].resolving(r, c) && !s[kV].free(r, c)) resolving_cols.insert(c);
      if (s[kV].free(r, c)) free_cols.insert(c);
    }
  }
  CHECK(resolving_cols == std::set<int>{3, 4, 5});
  CHECK(free_cols == std::set<int>{6, 7});

  // Step 6: the free touches resolve C4.
  s = take_free({}, labels(s[kV].free));
  CHECK(g.pixels()(2, 4) == -1);
  CHECK(count(s[kV].required) == 0);
  CHECK(count(s[kV].resolving) + count(s[kS].resolving) == 0);

  // Step 7: void at E4; E0, E1, F0, F1 become required, with both free and
  // resolving-only void touches present.
  s = single(StepKind::kValid, kV, "E4");
  CHECK(labels(s[kV].required) == Labels{"E0", "E1", "F0", "F1"});
  CHECK(count(s[kV].free) > 0);
  CHECK(count(logical_and(s[kV].resolving, logical_not(s[kV].free))) > 0);

  // Step 8: free touches resolve E1 and F1 only.
  s = take_free({}, labels(s[kV].free));
  CHECK(labels(s[kV].required) == Labels{"E0", "F0"});

  // Step 9: resolving void touch at F0; F1 and F2 turn free.
  s = single(StepKind::kResolving, kV, "F0");
  CHECK(count(s[kV].required) == 0);
  CHECK(labels(s[kV].free) == Labels{"F1", "F2"});

  // Step 10.
  s = take_free({}, {"F1", "F2"});

  // Step 11: void at C5 leaves A3 and C2 required; no solid touch remains
  // valid and every remaining void touch is free.
  s = single(StepKind::kValid, kV, "C5");
  CHECK(labels(s[kV].required) == Labels{"A3", "C2"});
  CHECK(count(s[kS].valid) == 0);
  CHECK(s[kV].free == s[kV].valid);

  // Step 12: the free touches complete the design.
  take_free({}, labels(s[kV].free));
  REQUIRE(g.complete());
  CHECK(g.iterations() == 11);

  BinaryGrid expected(6, 8, BinaryGrid::kVoid);
  for (auto [r, c] : {std::pair{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2}, {2, 0}, {2, 1}}) {
    expected.set(r, c, BinaryGrid::kSolid);
  }
  CHECK(g.design() == expected);
  CHECK(is_feasible(g.design(), b));
}

}  // namespace

TEST_CASE("walkthrough with full recomputation") { walk(UpdateMode::kFull); }

TEST_CASE("walkthrough with incremental updates") { walk(UpdateMode::kIncremental); }
