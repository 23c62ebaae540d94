#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "fabopt/grid.hpp"
#include "fabopt/morphology.hpp"

namespace fabopt {

/// Raised when generator state breaks one of its structural invariants.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Touch {
  int row = 0;
  int col = 0;
  Phase phase = Phase::kSolid;
  friend bool operator==(const Touch&, const Touch&) = default;
};

/// Solid and void touches of a partially generated design. Touch grids cover
/// the design plus the border margin (zero margin for padded borders), so a
/// touch at grid position (r, c) sits at design pixel (r - margin, c - margin).
/// All Touch coordinates in this header are touch-grid coordinates.
struct PartialDesign {
  Mask solid_touches;
  Mask void_touches;

  static PartialDesign empty(int rows, int cols, const BorderMode& border);

  const Mask& touches(Phase p) const { return p == Phase::kSolid ? solid_touches : void_touches; }
  Mask& touches(Phase p) { return p == Phase::kSolid ? solid_touches : void_touches; }
};

/// Pixel and touch states for one polarity.
struct PhaseStates {
  Mask existing;    // pixels assigned by some touch
  Mask possible;    // pixels that are or may still become this polarity
  Mask required;    // pixels not existing and no longer possible for the opposite polarity
  Mask impossible;  // touches that would overwrite an existing opposite pixel
  Mask valid;       // touches neither impossible nor already placed
  Mask resolving;   // valid touches that assign a required pixel
  Mask free;        // valid touches that cover no pixel possible for the opposite polarity
};

struct StateSet {
  std::array<PhaseStates, 2> phase;
  const PhaseStates& operator[](Phase p) const { return phase[static_cast<int>(p)]; }
  PhaseStates& operator[](Phase p) { return phase[static_cast<int>(p)]; }
};

/// Full recomputation of every state from the touch grids using morphology
/// primitives. Throws InvariantViolation when a pixel is claimed by both
/// polarities.
StateSet compute_states(const PartialDesign& p, const Brush& b,
                        const BorderMode& border = BorderMode::padded());

/// Which footprint pixels a touch reward sums over. Footprint pixels beyond
/// the design edge take the reward of the nearest design pixel.
enum class RewardMode {
  kAllCovered,     // every pixel under the brush
  kNewlyAssigned,  // only pixels not already existing for the touch polarity
};

enum class UpdateMode {
  kFull,         // recompute all states with full-grid morphology each step
  kIncremental,  // event-driven count updates local to the changed pixels
};

enum class TieBreak {
  kLowestIndex,  // lowest (row, col), then solid before void
  kSeeded,       // uniform among exact ties, seeded
};

struct GeneratorOptions {
  UpdateMode update = UpdateMode::kIncremental;
  RewardMode reward = RewardMode::kAllCovered;
  TieBreak tie_break = TieBreak::kLowestIndex;
  std::uint64_t seed = 0;
};

enum class StepKind { kFree, kResolving, kValid };

struct StepRecord {
  int iteration = 0;
  StepKind kind = StepKind::kValid;
  std::vector<Touch> touches;
  double reward = 0.0;  // reward of the single chosen touch; 0 for free steps
  std::size_t newly_decided = 0;
  std::size_t undecided_after = 0;
  // State summary before the selection was made.
  std::array<std::size_t, 2> valid_count{};
  std::array<std::size_t, 2> resolving_count{};
  std::array<std::size_t, 2> free_count{};
  std::array<std::size_t, 2> required_count{};
};

/// Reward-conditioned generator of brush-feasible designs.
///
/// Starts from empty touch sets and repeatedly: takes every free touch if any
/// exist, otherwise the best resolving touch, otherwise the best valid touch,
/// until every pixel is assigned. Rewards are positive theta sums for solid
/// touches and negative sums for void touches.
class Generator {
 public:
  Generator(RealGrid theta, Brush brush, BorderMode border = BorderMode::padded(),
            GeneratorOptions options = {});
  ~Generator();
  Generator(Generator&&) noexcept;
  Generator& operator=(Generator&&) noexcept;

  bool complete() const;
  /// Performs one selection. Throws std::logic_error when already complete.
  StepRecord step();
  /// Runs to completion and returns the design.
  BinaryGrid run(const std::function<void(const StepRecord&)>& on_step = {});

  /// Current states, materialized on the extended (design + margin) grid.
  StateSet states() const;
  PartialDesign partial() const;
  /// Reward of a touch in the current state (extended-grid coordinates).
  double reward(const Touch& t) const;
  /// Design pixels: +1 existing solid, -1 existing void, 0 undecided.
  Grid<std::int8_t> pixels() const;
  /// Requires complete().
  BinaryGrid design() const;

  std::size_t undecided() const;
  int iterations() const;
  int margin() const;

 private:
  class Engine;
  std::unique_ptr<Engine> engine_;
};

BinaryGrid generate(const RealGrid& theta, const Brush& b,
                    const BorderMode& border = BorderMode::padded(),
                    const GeneratorOptions& options = {},
                    const std::function<void(const StepRecord&)>& on_step = {});

/// Reward of placing `t` given the touches in `p`.
/// Throws std::invalid_argument when the touch is not valid.
double touch_reward(const RealGrid& theta, const Touch& t, const PartialDesign& p,
                    const Brush& b, const BorderMode& border = BorderMode::padded(),
                    RewardMode mode = RewardMode::kAllCovered);

/// Seeded uniform reward array in (-1, 1).
RealGrid random_reward(int rows, int cols, std::uint64_t seed);

/// generate() driven by random_reward(rows, cols, seed).
BinaryGrid random_feasible(const Brush& b, int rows, int cols, std::uint64_t seed,
                           const BorderMode& border = BorderMode::padded());

}  // namespace fabopt
