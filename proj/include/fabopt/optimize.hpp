#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fabopt/generator.hpp"
#include "fabopt/grid.hpp"
#include "fabopt/morphology.hpp"
#include "fabopt/problems.hpp"

namespace fabopt {

/// Raised when a gradient contains NaN or infinity.
class NonFiniteGradient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Latent -> reward transform and its matching straight-through estimator:
/// tanh(beta * (t correlated with the brush footprint)), zero padded.
struct TransformConfig {
  double beta = 4.0;
  Brush brush = make_brush(BrushShape::kCircular, 1);
  std::vector<Symmetry> symmetry;
  /// Divide the footprint by its pixel count (a local mean instead of a sum).
  bool normalize_brush = false;

  void validate() const;
};

/// out(p) = sum over footprint offsets o of t(p + o); out-of-grid terms are 0.
RealGrid correlate(const RealGrid& t, const Brush& b);
/// Adjoint of correlate: out(q) = sum over o of g(q - o).
RealGrid correlate_adjoint(const RealGrid& g, const Brush& b);

RealGrid transform(const RealGrid& latent, const TransformConfig& cfg);
/// Vector-Jacobian product of transform() at `latent`.
RealGrid transform_vjp(const RealGrid& latent, const RealGrid& upstream, const TransformConfig& cfg);

/// Average over the group generated by the reflections. Throws
/// std::invalid_argument for a diagonal mirror on a non-square grid.
RealGrid symmetrize(const RealGrid& theta, const std::vector<Symmetry>& symmetry);
/// Applies every group element to `x` and reports whether all agree with it.
bool is_symmetric(const BinaryGrid& x, const std::vector<Symmetry>& symmetry);

/// Gradient with respect to the generator input theta, using the estimator
/// tanh(beta * (theta correlated with b)) in place of the generator.
RealGrid ste_backward(const RealGrid& theta, const RealGrid& upstream, const TransformConfig& cfg);

struct LatentDesign {
  RealGrid values;
  double bias = 0.0;
};

/// Seeded noise plus the smallest doubling bias (from 2^-10) for which the
/// generated first design is the most solid one the border permits; all
/// solid for a padded border. Throws std::runtime_error if none is found.
LatentDesign init_latent(int rows, int cols, const TransformConfig& cfg, std::uint64_t seed,
                         const BorderMode& border = BorderMode::padded(), double noise = 0.01,
                         const GeneratorOptions& gen = {});

struct AdamState {
  int step = 0;
  RealGrid m;
  RealGrid v;
  double learning_rate = 0.01;
  double beta1 = 0.667;
  double beta2 = 0.9;
  double epsilon = 1e-8;
};

/// One bias-corrected Adam update of `latent` in place. Throws
/// NonFiniteGradient before touching any state if `grad` is not finite.
void adam_step(AdamState& s, const RealGrid& grad, RealGrid& latent);

struct OptimizeConfig {
  TransformConfig transform;
  AdamState adam;
  int budget = 300;
  std::uint64_t seed = 0;
  double init_noise = 0.01;
  /// Freeze the waveguide stubs and cladding around the design in the generator.
  bool fixed_border = false;
  GeneratorOptions generator;
  /// Stop after the first step whose design meets the spec.
  bool stop_when_met = false;
};

struct StepResult {
  int step = 0;
  BinaryGrid design;
  std::uint64_t design_hash = 0;
  double loss = 0.0;
  bool spec_met = false;
  bool feasible = false;
  SVector s;
};

struct Trajectory {
  std::vector<StepResult> steps;
  bool failed = false;
  std::string error;
  double initial_bias = 0.0;

  /// First step meeting the spec, if any.
  std::optional<int> first_met() const;
  /// Lowest-loss step (earliest on ties); requires a non-empty trajectory.
  const StepResult& best() const;
};

/// FNV-1a over shape and pixel values.
std::uint64_t design_hash(const BinaryGrid& x);

/// Runs steps 0..budget: each evaluates the generated design and, except the
/// last, updates the latent. A solver failure ends the run with
/// `failed` set and the steps completed so far.
Trajectory run_optimization(const ProblemDefinition& problem, const OptimizeConfig& cfg,
                            const std::function<void(const StepResult&)>& on_step = {});

}  // namespace fabopt
