#include "fabopt/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fabopt {

namespace {

constexpr std::array<Phase, 2> kPhases{Phase::kSolid, Phase::kVoid};

int idx(Phase p) { return static_cast<int>(p); }

// Static geometry shared by both update modes: the touch grid is the design
// embedded in its border margin.
struct Layout {
  int rows = 0;  // design
  int cols = 0;
  int margin = 0;
  int ext_rows = 0;
  int ext_cols = 0;
  Mask need;                          // pixels that must end up assigned
  std::array<Mask, 2> frame_blocks;  // frame pixels that forbid touches of a phase

  Layout(int r, int c, const BorderMode& border) : rows(r), cols(c), margin(border.margin()) {
    border.check_shape(rows, cols);
    ext_rows = rows + 2 * margin;
    ext_cols = cols + 2 * margin;
    need = Mask(ext_rows, ext_cols, 0);
    for (auto& fb : frame_blocks) fb = Mask(ext_rows, ext_cols, 0);
    if (margin > 0) {
      const auto& frame = border.frame();
      for (std::size_t i = 0; i < frame.size(); ++i) {
        if (frame[i] > 0) {
          need[i] = 1;
          frame_blocks[idx(Phase::kVoid)][i] = 1;
        } else if (frame[i] < 0) {
          need[i] = 1;
          frame_blocks[idx(Phase::kSolid)][i] = 1;
        }
      }
    }
    for (int rr = 0; rr < rows; ++rr) {
      for (int cc = 0; cc < cols; ++cc) {
        const auto i = need.index(rr + margin, cc + margin);
        need[i] = 1;
        frame_blocks[0][i] = 0;
        frame_blocks[1][i] = 0;
      }
    }
  }

  bool in_design(int r, int c) const {
    return r >= margin && r < margin + rows && c >= margin && c < margin + cols;
  }
};

StateSet states_from_touches(const std::array<const Mask*, 2>& touched, const Brush& b,
                             const Layout& layout) {
  const Brush hit = b.reflected();
  StateSet s;
  for (auto p : kPhases) s[p].existing = dilate(*touched[idx(p)], b);
  for (std::size_t i = 0; i < s[Phase::kSolid].existing.size(); ++i) {
    if (s[Phase::kSolid].existing[i] && s[Phase::kVoid].existing[i]) {
      throw InvariantViolation("pixel " + std::to_string(i) +
                               " is assigned to both solid and void");
    }
  }
  for (auto p : kPhases) {
    const auto& opp = s[opposite(p)];
    auto& st = s[p];
    st.impossible = dilate(logical_or(opp.existing, layout.frame_blocks[idx(p)]), hit);
    st.valid = logical_and(logical_not(st.impossible), logical_not(*touched[idx(p)]));
    st.possible = dilate(logical_or(*touched[idx(p)], st.valid), b);
  }
  for (auto p : kPhases) {
    auto& st = s[p];
    const auto& opp = s[opposite(p)];
    st.required = logical_and(layout.need,
                              logical_and(logical_not(st.existing), logical_not(opp.possible)));
  }
  for (auto p : kPhases) {
    auto& st = s[p];
    const auto& opp = s[opposite(p)];
    st.resolving = logical_and(dilate(st.required, hit), st.valid);
    st.free = logical_and(logical_not(dilate(logical_or(opp.possible, opp.existing), hit)),
                          st.valid);
  }
  return s;
}

// Reward of touch (r, c) for phase p. Footprint pixels beyond the design edge
// take the reward of the nearest design pixel, so a placement flush with the
// edge scores like one in the interior. `existing(i)` reports whether touch-grid
// pixel i is already assigned to p. Summation order is the brush offset
// order, shared by both update modes so that they agree bit for bit.
template <typename Existing>
double touch_sum(const RealGrid& theta, const Brush& b, const Layout& layout, int r, int c,
                 Phase p, RewardMode mode, Existing&& existing) {
  double sum = 0.0;
  for (const auto& o : b.offsets()) {
    const int pr = r + o.dr, pc = c + o.dc;
    if (mode == RewardMode::kNewlyAssigned && pr >= 0 && pr < layout.ext_rows && pc >= 0 &&
        pc < layout.ext_cols &&
        existing(static_cast<std::size_t>(pr) * static_cast<std::size_t>(layout.ext_cols) +
                 static_cast<std::size_t>(pc))) {
      continue;
    }
    const int dr = std::clamp(pr - layout.margin, 0, layout.rows - 1);
    const int dc = std::clamp(pc - layout.margin, 0, layout.cols - 1);
    sum += theta(dr, dc);
  }
  return p == Phase::kSolid ? sum : -sum;
}

void check_theta(const RealGrid& theta, const Layout& layout) {
  if (theta.rows() != layout.rows || theta.cols() != layout.cols) {
    throw std::invalid_argument("reward array shape does not match the design");
  }
  for (double v : theta.data()) {
    if (!std::isfinite(v)) throw std::invalid_argument("reward array must be finite");
  }
}

}  // namespace

PartialDesign PartialDesign::empty(int rows, int cols, const BorderMode& border) {
  border.check_shape(rows, cols);
  const int m = border.margin();
  return {Mask(rows + 2 * m, cols + 2 * m, 0), Mask(rows + 2 * m, cols + 2 * m, 0)};
}

StateSet compute_states(const PartialDesign& p, const Brush& b, const BorderMode& border) {
  if (!p.solid_touches.same_shape(p.void_touches)) {
    throw std::invalid_argument("solid and void touch grids differ in shape");
  }
  const int m = border.margin();
  const Layout layout(p.solid_touches.rows() - 2 * m, p.solid_touches.cols() - 2 * m, border);
  return states_from_touches({&p.solid_touches, &p.void_touches}, b, layout);
}

class Generator::Engine {
 public:
  Engine(RealGrid theta, Brush brush, const BorderMode& border, GeneratorOptions options)
      : layout_(theta.rows(), theta.cols(), border),
        theta_(std::move(theta)),
        brush_(std::move(brush)),
        options_(options),
        rng_(options.seed) {
    check_theta(theta_, layout_);
    const int n = layout_.ext_rows * layout_.ext_cols;
    for (auto p : kPhases) {
      touched_[idx(p)] = Mask(layout_.ext_rows, layout_.ext_cols, 0);
      reward_[idx(p)].assign(n, 0.0);
      reward_dirty_[idx(p)].assign(n, 1);
    }
    undecided_ = count(layout_.need);
    if (options_.update == UpdateMode::kIncremental) init_counts();
  }

  bool complete() const { return undecided_ == 0; }
  std::size_t ext_index(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(layout_.ext_cols) +
           static_cast<std::size_t>(c);
  }
  bool ext_contains(int r, int c) const {
    return r >= 0 && r < layout_.ext_rows && c >= 0 && c < layout_.ext_cols;
  }
  std::size_t ext_size() const { return layout_.need.size(); }
  std::size_t undecided() const { return undecided_; }
  int iterations() const { return iteration_; }
  const Layout& layout() const { return layout_; }

  StepRecord step() {
    if (complete()) throw std::logic_error("generator already complete");
    StepRecord rec;
    rec.iteration = ++iteration_;
    if (options_.update == UpdateMode::kFull) full_states_ = states();

    std::vector<Touch> free_touches;
    bool any_resolving = false;
    for (int r = 0; r < layout_.ext_rows; ++r) {
      for (int c = 0; c < layout_.ext_cols; ++c) {
        const auto i = ext_index(r, c);
        for (auto p : kPhases) {
          const int k = idx(p);
          if (is_required(p, i)) ++rec.required_count[k];
          if (!is_valid(p, i)) continue;
          ++rec.valid_count[k];
          if (is_free(p, i)) {
            ++rec.free_count[k];
            free_touches.push_back({r, c, p});
          }
          if (is_resolving(p, i)) {
            ++rec.resolving_count[k];
            any_resolving = true;
          }
        }
      }
    }

    const std::size_t before = undecided_;
    if (!free_touches.empty()) {
      rec.kind = StepKind::kFree;
      rec.touches = free_touches;
      for (const auto& t : free_touches) place(t);
    } else {
      rec.kind = any_resolving ? StepKind::kResolving : StepKind::kValid;
      const auto choice = select(any_resolving);
      if (!choice) {
        throw InvariantViolation("generator stalled: design incomplete with no valid touch");
      }
      rec.touches = {choice->first};
      rec.reward = choice->second;
      place(choice->first);
    }
    if (options_.update == UpdateMode::kFull) full_states_.reset();
    rec.newly_decided = before - undecided_;
    rec.undecided_after = undecided_;
    return rec;
  }

  StateSet states() const {
    if (options_.update == UpdateMode::kFull) {
      return states_from_touches({&touched_[0], &touched_[1]}, brush_, layout_);
    }
    StateSet s;
    const int R = layout_.ext_rows, C = layout_.ext_cols;
    for (auto p : kPhases) {
      const int k = idx(p);
      auto& st = s[p];
      st.existing = Mask(R, C);
      st.possible = Mask(R, C);
      st.required = Mask(R, C);
      st.impossible = Mask(R, C);
      st.valid = Mask(R, C);
      st.resolving = Mask(R, C);
      st.free = Mask(R, C);
      for (std::size_t i = 0; i < st.existing.size(); ++i) {
        st.existing[i] = cover_cnt_[k][i] > 0;
        st.possible[i] = poss_cnt_[k][i] > 0;
        st.required[i] = required_[k][i];
        st.impossible[i] = imp_cnt_[k][i] > 0;
        st.valid[i] = is_valid(p, i);
        st.resolving[i] = is_resolving(p, i);
        st.free[i] = is_free(p, i);
      }
    }
    return s;
  }

  PartialDesign partial() const { return {touched_[0], touched_[1]}; }

  double reward(const Touch& t) {
    if (!ext_contains(t.row, t.col)) throw std::invalid_argument("touch outside grid");
    const auto i = ext_index(t.row, t.col);
    if (options_.update == UpdateMode::kFull) {
      const StateSet s = states();
      return touch_sum(theta_, brush_, layout_, t.row, t.col, t.phase, options_.reward,
                       [&](std::size_t j) { return s[t.phase].existing[j] != 0; });
    }
    return cached_reward(t.phase, i, t.row, t.col);
  }

  Grid<std::int8_t> pixels() const {
    Grid<std::int8_t> out(layout_.rows, layout_.cols, 0);
    const auto ex = existing_masks();
    for (int r = 0; r < layout_.rows; ++r) {
      for (int c = 0; c < layout_.cols; ++c) {
        const auto i = ext_index(r + layout_.margin, c + layout_.margin);
        if (ex[0][i]) out(r, c) = BinaryGrid::kSolid;
        if (ex[1][i]) out(r, c) = BinaryGrid::kVoid;
      }
    }
    return out;
  }

 private:
  // --- state queries, dispatched on update mode -------------------------

  bool is_valid(Phase p, std::size_t i) const {
    if (full_states_) return full_states_->operator[](p).valid[i];
    return !touched_[idx(p)][i] && imp_cnt_[idx(p)][i] == 0;
  }
  bool is_free(Phase p, std::size_t i) const {
    if (full_states_) return full_states_->operator[](p).free[i];
    return is_valid(p, i) && opp_poss_cnt_[idx(p)][i] == 0;
  }
  bool is_resolving(Phase p, std::size_t i) const {
    if (full_states_) return full_states_->operator[](p).resolving[i];
    return is_valid(p, i) && req_cnt_[idx(p)][i] > 0;
  }
  bool is_required(Phase p, std::size_t i) const {
    if (full_states_) return full_states_->operator[](p).required[i];
    if (options_.update == UpdateMode::kFull) return states()[p].required[i];
    return required_[idx(p)][i];
  }
  bool is_existing(Phase p, std::size_t i) const {
    if (full_states_) return full_states_->operator[](p).existing[i];
    return cover_cnt_[idx(p)][i] > 0;
  }

  std::array<Mask, 2> existing_masks() const {
    if (options_.update == UpdateMode::kFull) {
      const Brush& b = brush_;
      return {dilate(touched_[0], b), dilate(touched_[1], b)};
    }
    std::array<Mask, 2> ex{Mask(layout_.ext_rows, layout_.ext_cols),
                           Mask(layout_.ext_rows, layout_.ext_cols)};
    for (int k = 0; k < 2; ++k) {
      for (std::size_t i = 0; i < ex[k].size(); ++i) ex[k][i] = cover_cnt_[k][i] > 0;
    }
    return ex;
  }

  double cached_reward(Phase p, std::size_t i, int r, int c) {
    const int k = idx(p);
    if (options_.update == UpdateMode::kFull || reward_dirty_[k][i]) {
      reward_[k][i] = touch_sum(theta_, brush_, layout_, r, c, p, options_.reward,
                                [&](std::size_t j) { return is_existing(p, j); });
      if (options_.update == UpdateMode::kIncremental) reward_dirty_[k][i] = 0;
    }
    return reward_[k][i];
  }

  std::optional<std::pair<Touch, double>> select(bool resolving_only) {
    std::optional<std::pair<Touch, double>> best;
    std::vector<Touch> ties;
    for (int r = 0; r < layout_.ext_rows; ++r) {
      for (int c = 0; c < layout_.ext_cols; ++c) {
        const auto i = ext_index(r, c);
        for (auto p : kPhases) {
          if (resolving_only ? !is_resolving(p, i) : !is_valid(p, i)) continue;
          const double w = cached_reward(p, i, r, c);
          if (!best || w > best->second) {
            best = {{r, c, p}, w};
            ties.clear();
            ties.push_back({r, c, p});
          } else if (w == best->second) {
            ties.push_back({r, c, p});
          }
        }
      }
    }
    if (best && options_.tie_break == TieBreak::kSeeded && ties.size() > 1) {
      std::uniform_int_distribution<std::size_t> pick(0, ties.size() - 1);
      best->first = ties[pick(rng_)];
    }
    return best;
  }

  // --- mutation ------------------------------------------------------------

  void place(const Touch& t) {
    const int k = idx(t.phase);
    const auto i = ext_index(t.row, t.col);
    if (touched_[k][i]) throw InvariantViolation("touch placed twice");
    touched_[k][i] = 1;
    if (options_.update == UpdateMode::kFull) {
      // Undecided count tracked directly from coverage.
      for (const auto& o : brush_.offsets()) {
        const int pr = t.row + o.dr, pc = t.col + o.dc;
        if (!ext_contains(pr, pc)) continue;
        const auto j = ext_index(pr, pc);
        if (!full_cover_[j] && layout_.need[j]) --undecided_;
        full_cover_[j] = 1;
      }
      return;
    }
    for (const auto& o : brush_.offsets()) {
      const int pr = t.row + o.dr, pc = t.col + o.dc;
      if (!ext_contains(pr, pc)) continue;
      const auto j = ext_index(pr, pc);
      if (cover_cnt_[k][j]++ == 0) on_existing(t.phase, j, pr, pc);
    }
  }

  // Calls f(touch_index) for every touch whose footprint contains pixel (r, c).
  template <typename F>
  void for_touches_covering(int r, int c, F&& f) const {
    for (const auto& o : brush_.offsets()) {
      const int tr = r - o.dr, tc = c - o.dc;
      if (ext_contains(tr, tc)) f(ext_index(tr, tc), tr, tc);
    }
  }

  // Calls f(pixel_index) for every pixel in the footprint of touch (r, c).
  template <typename F>
  void for_pixels_under(int r, int c, F&& f) const {
    for (const auto& o : brush_.offsets()) {
      const int pr = r + o.dr, pc = c + o.dc;
      if (ext_contains(pr, pc)) f(ext_index(pr, pc), pr, pc);
    }
  }

  void on_existing(Phase p, std::size_t j, int r, int c) {
    const int k = idx(p);
    const Phase q = opposite(p);
    const int kq = idx(q);
    if (cover_cnt_[kq][j] > 0) throw InvariantViolation("pixel assigned to both polarities");
    if (layout_.need[j]) --undecided_;
    if (!layout_.frame_blocks[kq][j]) {
      for_touches_covering(r, c, [&](std::size_t u, int ur, int uc) {
        if (imp_cnt_[kq][u]++ == 0 && !touched_[kq][u]) invalidate(q, u, ur, uc);
      });
    }
    update_required(p, j, r, c);
    for_touches_covering(r, c, [&](std::size_t u, int, int) { reward_dirty_[k][u] = 1; });
  }

  void invalidate(Phase p, std::size_t, int r, int c) {
    const int k = idx(p);
    for_pixels_under(r, c, [&](std::size_t j, int pr, int pc) {
      if (--poss_cnt_[k][j] == 0) on_possible_lost(p, j, pr, pc);
    });
  }

  void on_possible_lost(Phase p, std::size_t j, int r, int c) {
    const Phase q = opposite(p);
    for_touches_covering(r, c, [&](std::size_t u, int, int) { --opp_poss_cnt_[idx(q)][u]; });
    update_required(q, j, r, c);
  }

  void update_required(Phase p, std::size_t j, int r, int c) {
    const int k = idx(p);
    const bool now = layout_.need[j] && cover_cnt_[k][j] == 0 && poss_cnt_[idx(opposite(p))][j] == 0;
    if (now == static_cast<bool>(required_[k][j])) return;
    required_[k][j] = now;
    const int delta = now ? 1 : -1;
    for_touches_covering(r, c, [&](std::size_t u, int, int) { req_cnt_[k][u] += delta; });
  }

  void init_counts() {
    const std::size_t n = ext_size();
    for (int k = 0; k < 2; ++k) {
      cover_cnt_[k].assign(n, 0);
      imp_cnt_[k].assign(n, 0);
      poss_cnt_[k].assign(n, 0);
      opp_poss_cnt_[k].assign(n, 0);
      req_cnt_[k].assign(n, 0);
      required_[k].assign(n, 0);
    }
    const int R = layout_.ext_rows, C = layout_.ext_cols;
    for (int k = 0; k < 2; ++k) {
      for (int r = 0; r < R; ++r) {
        for (int c = 0; c < C; ++c) {
          if (!layout_.frame_blocks[k][ext_index(r, c)]) continue;
          for_touches_covering(r, c, [&](std::size_t u, int, int) { ++imp_cnt_[k][u]; });
        }
      }
      for (int r = 0; r < R; ++r) {
        for (int c = 0; c < C; ++c) {
          if (imp_cnt_[k][ext_index(r, c)] != 0) continue;
          for_pixels_under(r, c, [&](std::size_t j, int, int) { ++poss_cnt_[k][j]; });
        }
      }
    }
    for (int k = 0; k < 2; ++k) {
      const int kq = 1 - k;
      for (int r = 0; r < R; ++r) {
        for (int c = 0; c < C; ++c) {
          const auto j = ext_index(r, c);
          if (poss_cnt_[kq][j] > 0) {
            for_touches_covering(r, c, [&](std::size_t u, int, int) { ++opp_poss_cnt_[k][u]; });
          }
          update_required(kPhases[k], j, r, c);
        }
      }
    }
  }

  Layout layout_;
  RealGrid theta_;
  Brush brush_;
  GeneratorOptions options_;
  std::mt19937_64 rng_;
  int iteration_ = 0;
  std::size_t undecided_ = 0;

  std::array<Mask, 2> touched_;
  std::array<std::vector<double>, 2> reward_;
  std::array<std::vector<std::uint8_t>, 2> reward_dirty_;

  // Incremental mode counts, indexed by touch or pixel on the touch grid.
  std::array<std::vector<int>, 2> cover_cnt_;     // touches of the phase covering a pixel
  std::array<std::vector<int>, 2> imp_cnt_;       // blocking pixels under a touch
  std::array<std::vector<int>, 2> poss_cnt_;      // placed-or-valid touches covering a pixel
  std::array<std::vector<int>, 2> opp_poss_cnt_;  // opposite-possible pixels under a touch
  std::array<std::vector<int>, 2> req_cnt_;       // required pixels under a touch
  std::array<std::vector<std::uint8_t>, 2> required_;

  // Full mode.
  std::optional<StateSet> full_states_;
  std::vector<std::uint8_t> full_cover_ = std::vector<std::uint8_t>(ext_size(), 0);
};

Generator::Generator(RealGrid theta, Brush brush, BorderMode border, GeneratorOptions options)
    : engine_(std::make_unique<Engine>(std::move(theta), std::move(brush), border, options)) {}
Generator::~Generator() = default;
Generator::Generator(Generator&&) noexcept = default;
Generator& Generator::operator=(Generator&&) noexcept = default;

bool Generator::complete() const { return engine_->complete(); }
StepRecord Generator::step() { return engine_->step(); }
StateSet Generator::states() const { return engine_->states(); }
PartialDesign Generator::partial() const { return engine_->partial(); }
double Generator::reward(const Touch& t) const { return engine_->reward(t); }
Grid<std::int8_t> Generator::pixels() const { return engine_->pixels(); }
std::size_t Generator::undecided() const { return engine_->undecided(); }
int Generator::iterations() const { return engine_->iterations(); }
int Generator::margin() const { return engine_->layout().margin; }

BinaryGrid Generator::design() const {
  if (!complete()) throw std::logic_error("design is incomplete");
  const auto px = pixels();
  BinaryGrid out(px.rows(), px.cols());
  for (int r = 0; r < px.rows(); ++r) {
    for (int c = 0; c < px.cols(); ++c) out.set(r, c, px(r, c));
  }
  return out;
}

BinaryGrid Generator::run(const std::function<void(const StepRecord&)>& on_step) {
  // Every non-free step assigns at least one pixel and every free step adds
  // at least one touch, so 2N + 1 iterations bound any run.
  const std::size_t limit = 2 * engine_->layout().need.size() + 1;
  while (!complete()) {
    const auto rec = step();
    if (on_step) on_step(rec);
    if (static_cast<std::size_t>(rec.iteration) > limit) {
      throw InvariantViolation("generator exceeded its iteration bound");
    }
  }
  return design();
}

BinaryGrid generate(const RealGrid& theta, const Brush& b, const BorderMode& border,
                    const GeneratorOptions& options,
                    const std::function<void(const StepRecord&)>& on_step) {
  Generator g(theta, b, border, options);
  return g.run(on_step);
}

double touch_reward(const RealGrid& theta, const Touch& t, const PartialDesign& p, const Brush& b,
                    const BorderMode& border, RewardMode mode) {
  const Layout layout(theta.rows(), theta.cols(), border);
  if (p.solid_touches.rows() != layout.ext_rows || p.solid_touches.cols() != layout.ext_cols) {
    throw std::invalid_argument("touch grids do not match the reward array");
  }
  check_theta(theta, layout);
  if (!layout.need.contains(t.row, t.col)) throw std::invalid_argument("touch outside grid");
  const StateSet s = states_from_touches({&p.solid_touches, &p.void_touches}, b, layout);
  if (!s[t.phase].valid(t.row, t.col)) {
    throw std::invalid_argument("touch at (" + std::to_string(t.row) + ", " +
                                std::to_string(t.col) + ") is not valid");
  }
  return touch_sum(theta, b, layout, t.row, t.col, t.phase, mode,
                   [&](std::size_t j) { return s[t.phase].existing[j] != 0; });
}

RealGrid random_reward(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RealGrid theta(rows, cols);
  for (auto& v : theta.data()) {
    // 53 random bits mapped to (-1, 1); avoids library-specific distributions.
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    v = 2.0 * u - 1.0;
  }
  return theta;
}

BinaryGrid random_feasible(const Brush& b, int rows, int cols, std::uint64_t seed,
                           const BorderMode& border) {
  return generate(random_reward(rows, cols, seed), b, border);
}

}  // namespace fabopt
