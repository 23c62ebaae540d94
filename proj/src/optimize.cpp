#include "fabopt/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace fabopt {

namespace {

using Perm = std::vector<std::size_t>;

Perm generator_perm(Symmetry s, int rows, int cols) {
  if (s == Symmetry::kDiagonal && rows != cols) {
    throw std::invalid_argument("diagonal symmetry needs a square grid");
  }
  Perm p(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      int rr = r, cc = c;
      switch (s) {
        case Symmetry::kDiagonal: rr = c, cc = r; break;
        case Symmetry::kMirrorX: rr = rows - 1 - r; break;
        case Symmetry::kMirrorY: cc = cols - 1 - c; break;
      }
      p[static_cast<std::size_t>(r) * cols + c] = static_cast<std::size_t>(rr) * cols + cc;
    }
  }
  return p;
}

// All elements of the group generated by the reflections, identity first.
std::vector<Perm> group(const std::vector<Symmetry>& symmetry, int rows, int cols) {
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  Perm id(n);
  for (std::size_t i = 0; i < n; ++i) id[i] = i;
  std::vector<Perm> gens;
  for (auto s : symmetry) gens.push_back(generator_perm(s, rows, cols));
  std::vector<Perm> elems{id};
  std::set<Perm> seen{id};
  for (std::size_t k = 0; k < elems.size(); ++k) {
    for (const auto& g : gens) {
      Perm next(n);
      for (std::size_t i = 0; i < n; ++i) next[i] = elems[k][g[i]];
      if (seen.insert(next).second) elems.push_back(std::move(next));
    }
  }
  return elems;
}

double footprint_weight(const TransformConfig& cfg) {
  return cfg.normalize_brush ? 1.0 / static_cast<double>(cfg.brush.pixel_count()) : 1.0;
}

void check_finite(const RealGrid& g) {
  for (double v : g.data()) {
    if (!std::isfinite(v)) throw NonFiniteGradient("gradient contains a non-finite value");
  }
}

}  // namespace

void TransformConfig::validate() const {
  if (!(beta > 0) || !std::isfinite(beta)) throw std::invalid_argument("transform beta must be positive");
}

RealGrid correlate(const RealGrid& t, const Brush& b) {
  RealGrid out(t.rows(), t.cols(), 0.0);
  for (int r = 0; r < t.rows(); ++r) {
    for (int c = 0; c < t.cols(); ++c) {
      double sum = 0.0;
      for (const auto& o : b.offsets()) {
        const int rr = r + o.dr, cc = c + o.dc;
        if (t.contains(rr, cc)) sum += t(rr, cc);
      }
      out(r, c) = sum;
    }
  }
  return out;
}

RealGrid correlate_adjoint(const RealGrid& g, const Brush& b) {
  RealGrid out(g.rows(), g.cols(), 0.0);
  for (int r = 0; r < g.rows(); ++r) {
    for (int c = 0; c < g.cols(); ++c) {
      double sum = 0.0;
      for (const auto& o : b.offsets()) {
        const int rr = r - o.dr, cc = c - o.dc;
        if (g.contains(rr, cc)) sum += g(rr, cc);
      }
      out(r, c) = sum;
    }
  }
  return out;
}

RealGrid transform(const RealGrid& latent, const TransformConfig& cfg) {
  cfg.validate();
  RealGrid out = correlate(latent, cfg.brush);
  const double k = cfg.beta * footprint_weight(cfg);
  for (double& v : out.data()) v = std::tanh(k * v);
  return out;
}

RealGrid transform_vjp(const RealGrid& latent, const RealGrid& upstream, const TransformConfig& cfg) {
  if (!latent.same_shape(upstream)) throw std::invalid_argument("gradient shape does not match");
  const RealGrid y = transform(latent, cfg);
  const double k = cfg.beta * footprint_weight(cfg);
  RealGrid local(y.rows(), y.cols());
  for (std::size_t i = 0; i < y.size(); ++i) local[i] = upstream[i] * k * (1.0 - y[i] * y[i]);
  return correlate_adjoint(local, cfg.brush);
}

RealGrid symmetrize(const RealGrid& theta, const std::vector<Symmetry>& symmetry) {
  if (symmetry.empty()) return theta;
  const auto elems = group(symmetry, theta.rows(), theta.cols());
  RealGrid out(theta.rows(), theta.cols(), 0.0);
  const double w = 1.0 / static_cast<double>(elems.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    double sum = 0.0;
    for (const auto& g : elems) sum += theta[g[i]];
    out[i] = sum * w;
  }
  return out;
}

bool is_symmetric(const BinaryGrid& x, const std::vector<Symmetry>& symmetry) {
  for (auto s : symmetry) {
    const Perm p = generator_perm(s, x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] != x[p[i]]) return false;
    }
  }
  return true;
}

RealGrid ste_backward(const RealGrid& theta, const RealGrid& upstream, const TransformConfig& cfg) {
  return transform_vjp(theta, upstream, cfg);
}

LatentDesign init_latent(int rows, int cols, const TransformConfig& cfg, std::uint64_t seed,
                         const BorderMode& border, double noise, const GeneratorOptions& gen) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, noise);
  RealGrid base(rows, cols);
  for (double& v : base.data()) v = normal(rng);

  const BinaryGrid target = border.is_padded()
                                ? BinaryGrid(rows, cols, BinaryGrid::kSolid)
                                : generate(RealGrid(rows, cols, 1.0), cfg.brush, border, gen);
  for (double bias = std::ldexp(1.0, -10); bias <= std::ldexp(1.0, 20); bias *= 2) {
    RealGrid values = base;
    for (double& v : values.data()) v += bias;
    const RealGrid theta = symmetrize(transform(values, cfg), cfg.symmetry);
    if (generate(theta, cfg.brush, border, gen) == target) return {std::move(values), bias};
  }
  throw std::runtime_error("no initialization bias yields the most solid design");
}

void adam_step(AdamState& s, const RealGrid& grad, RealGrid& latent) {
  if (!grad.same_shape(latent)) throw std::invalid_argument("gradient shape does not match the latent");
  check_finite(grad);
  if (s.m.empty()) {
    s.m = RealGrid(latent.rows(), latent.cols(), 0.0);
    s.v = RealGrid(latent.rows(), latent.cols(), 0.0);
  }
  if (!s.m.same_shape(latent)) throw std::invalid_argument("Adam moments do not match the latent");
  ++s.step;
  const double c1 = 1.0 - std::pow(s.beta1, s.step);
  const double c2 = 1.0 - std::pow(s.beta2, s.step);
  for (std::size_t i = 0; i < latent.size(); ++i) {
    s.m[i] = s.beta1 * s.m[i] + (1.0 - s.beta1) * grad[i];
    s.v[i] = s.beta2 * s.v[i] + (1.0 - s.beta2) * grad[i] * grad[i];
    const double mhat = s.m[i] / c1;
    const double vhat = s.v[i] / c2;
    latent[i] -= s.learning_rate * mhat / (std::sqrt(vhat) + s.epsilon);
  }
}

std::optional<int> Trajectory::first_met() const {
  for (const auto& s : steps) {
    if (s.spec_met) return s.step;
  }
  return std::nullopt;
}

const StepResult& Trajectory::best() const {
  if (steps.empty()) throw std::logic_error("empty trajectory");
  const StepResult* best = &steps.front();
  for (const auto& s : steps) {
    if (s.loss < best->loss) best = &s;
  }
  return *best;
}

std::uint64_t design_hash(const BinaryGrid& x) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::uint8_t byte) {
    h ^= byte;
    h *= 1099511628211ull;
  };
  for (int v : {x.rows(), x.cols()}) {
    for (int k = 0; k < 4; ++k) mix(static_cast<std::uint8_t>(static_cast<unsigned>(v) >> (8 * k)));
  }
  for (std::size_t i = 0; i < x.size(); ++i) mix(static_cast<std::uint8_t>(x[i]));
  return h;
}

Trajectory run_optimization(const ProblemDefinition& problem, const OptimizeConfig& cfg,
                            const std::function<void(const StepResult&)>& on_step) {
  if (cfg.budget < 0) throw std::invalid_argument("budget must be non-negative");
  const int rows = problem.design_rows(), cols = problem.design_cols();
  const BorderMode border = cfg.fixed_border ? problem.border(std::max(1, cfg.transform.brush.extent()))
                                             : BorderMode::padded();
  Trajectory traj;
  LatentDesign latent = init_latent(rows, cols, cfg.transform, cfg.seed, border, cfg.init_noise, cfg.generator);
  traj.initial_bias = latent.bias;
  AdamState adam = cfg.adam;
  adam.step = 0;
  adam.m = RealGrid();
  adam.v = RealGrid();

  for (int step = 0; step <= cfg.budget; ++step) {
    const RealGrid theta = symmetrize(transform(latent.values, cfg.transform), cfg.transform.symmetry);
    StepResult res;
    res.step = step;
    res.design = generate(theta, cfg.transform.brush, border, cfg.generator);
    res.design_hash = design_hash(res.design);
    res.feasible = is_feasible(res.design, cfg.transform.brush, border);
    const bool last = step == cfg.budget;
    Evaluation ev;
    try {
      ev = evaluate(problem, res.design, !last);
    } catch (const fdfd::SolverError& e) {
      traj.failed = true;
      traj.error = e.what();
      break;
    }
    res.loss = ev.loss;
    res.spec_met = ev.spec_met;
    res.s = std::move(ev.s);
    traj.steps.push_back(res);
    if (on_step) on_step(traj.steps.back());
    if (last || (cfg.stop_when_met && res.spec_met)) break;

    const RealGrid g_theta = symmetrize(ste_backward(theta, ev.gradient, cfg.transform), cfg.transform.symmetry);
    const RealGrid g_latent = transform_vjp(latent.values, g_theta, cfg.transform);
    try {
      adam_step(adam, g_latent, latent.values);
    } catch (const NonFiniteGradient& e) {
      traj.failed = true;
      traj.error = e.what();
      break;
    }
  }
  return traj;
}

}  // namespace fabopt
