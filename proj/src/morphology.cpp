#include "fabopt/morphology.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace fabopt {

namespace {

constexpr std::uint8_t kUnset = 0;
constexpr std::uint8_t kSet = 1;
constexpr std::uint8_t kFree = 2;  // unconstrained

// Grid embedded in its border frame, tri-state per pixel.
struct Extended {
  int margin = 0;
  Grid<std::uint8_t> state;
};

Extended embed(const Mask& g, const BorderMode& border, Phase phase) {
  border.check_shape(g.rows(), g.cols());
  const int m = border.margin();
  Extended ext{m, Grid<std::uint8_t>(g.rows() + 2 * m, g.cols() + 2 * m, kFree)};
  if (m > 0) {
    const auto& frame = border.frame();
    const std::int8_t set_value = phase == Phase::kSolid ? 1 : -1;
    for (std::size_t i = 0; i < frame.size(); ++i) {
      if (frame[i] == 0) continue;
      ext.state[i] = frame[i] == set_value ? kSet : kUnset;
    }
  }
  for (int r = 0; r < g.rows(); ++r) {
    for (int c = 0; c < g.cols(); ++c) ext.state(r + m, c + m) = g(r, c) ? kSet : kUnset;
  }
  return ext;
}

// Per-row prefix counts of pixels equal to `value`.
Grid<int> row_prefix(const Grid<std::uint8_t>& s, std::uint8_t value) {
  Grid<int> p(s.rows(), s.cols() + 1, 0);
  for (int r = 0; r < s.rows(); ++r) {
    for (int c = 0; c < s.cols(); ++c) p(r, c + 1) = p(r, c) + (s(r, c) == value ? 1 : 0);
  }
  return p;
}

int range_count(const Grid<int>& prefix, int r, int c0, int c1, int cols) {
  c0 = std::max(c0, 0);
  c1 = std::min(c1, cols - 1);
  if (c0 > c1) return 0;
  return prefix(r, c1 + 1) - prefix(r, c0);
}

Mask erode_state(const Grid<std::uint8_t>& s, const Brush& b) {
  const auto unset = row_prefix(s, kUnset);
  Mask out(s.rows(), s.cols(), 0);
  for (int r = 0; r < s.rows(); ++r) {
    for (int c = 0; c < s.cols(); ++c) {
      bool all = true;
      for (const auto& run : b.runs()) {
        const int rr = r + run.dr;
        if (rr < 0 || rr >= s.rows()) continue;
        if (range_count(unset, rr, c + run.dc_begin, c + run.dc_end, s.cols()) > 0) {
          all = false;
          break;
        }
      }
      out(r, c) = all;
    }
  }
  return out;
}

Mask dilate_state(const Grid<std::uint8_t>& s, const Brush& b) {
  const auto set = row_prefix(s, kSet);
  Mask out(s.rows(), s.cols(), 0);
  for (int r = 0; r < s.rows(); ++r) {
    for (int c = 0; c < s.cols(); ++c) {
      bool hit = false;
      for (const auto& run : b.runs()) {
        const int rr = r - run.dr;
        if (rr < 0 || rr >= s.rows()) continue;
        if (range_count(set, rr, c - run.dc_end, c - run.dc_begin, s.cols()) > 0) {
          hit = true;
          break;
        }
      }
      out(r, c) = hit;
    }
  }
  return out;
}

Grid<std::uint8_t> as_state(const Mask& m) {
  Grid<std::uint8_t> s(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.size(); ++i) s[i] = m[i] ? kSet : kUnset;
  return s;
}

Mask crop(const Mask& ext, int margin, int rows, int cols) {
  if (margin == 0) return ext;
  Mask out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) out(r, c) = ext(r + margin, c + margin);
  }
  return out;
}

std::vector<BrushRun> build_runs(const std::vector<Offset>& offsets) {
  std::vector<BrushRun> runs;
  for (const auto& o : offsets) {
    if (!runs.empty() && runs.back().dr == o.dr && runs.back().dc_end + 1 == o.dc) {
      runs.back().dc_end = o.dc;
    } else {
      runs.push_back({o.dr, o.dc, o.dc});
    }
  }
  return runs;
}

bool four_connected(const Mask& m) {
  std::vector<std::pair<int, int>> stack;
  Mask seen(m.rows(), m.cols(), 0);
  std::size_t total = count(m);
  for (int r = 0; r < m.rows() && stack.empty(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (m(r, c)) {
        stack.emplace_back(r, c);
        seen(r, c) = 1;
        break;
      }
    }
  }
  std::size_t reached = 0;
  while (!stack.empty()) {
    auto [r, c] = stack.back();
    stack.pop_back();
    ++reached;
    const int dr[] = {1, -1, 0, 0};
    const int dc[] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int nr = r + dr[k], nc = c + dc[k];
      if (m.contains(nr, nc) && m(nr, nc) && !seen(nr, nc)) {
        seen(nr, nc) = 1;
        stack.emplace_back(nr, nc);
      }
    }
  }
  return total > 0 && reached == total;
}

}  // namespace

Brush::Brush(BrushShape shape, int size, Mask footprint, int anchor_row, int anchor_col)
    : shape_(shape),
      size_(size),
      footprint_(std::move(footprint)),
      anchor_row_(anchor_row),
      anchor_col_(anchor_col) {
  if (!four_connected(footprint_)) {
    throw std::invalid_argument("brush footprint must be nonempty and 4-connected");
  }
  for (int r = 0; r < footprint_.rows(); ++r) {
    for (int c = 0; c < footprint_.cols(); ++c) {
      if (!footprint_(r, c)) continue;
      Offset o{r - anchor_row_, c - anchor_col_};
      offsets_.push_back(o);
      extent_ = std::max({extent_, std::abs(o.dr), std::abs(o.dc)});
    }
  }
  runs_ = build_runs(offsets_);
}

Brush Brush::reflected() const {
  Mask flipped(footprint_.rows(), footprint_.cols());
  for (int r = 0; r < footprint_.rows(); ++r) {
    for (int c = 0; c < footprint_.cols(); ++c) {
      flipped(footprint_.rows() - 1 - r, footprint_.cols() - 1 - c) = footprint_(r, c);
    }
  }
  return Brush(shape_, size_, std::move(flipped), footprint_.rows() - 1 - anchor_row_,
               footprint_.cols() - 1 - anchor_col_);
}

bool Brush::symmetric() const {
  const Brush r = reflected();
  return r.anchor_row_ == anchor_row_ && r.anchor_col_ == anchor_col_ &&
         r.footprint_ == footprint_;
}

std::string Brush::spec() const {
  return std::string(shape_ == BrushShape::kCircular ? "circle" : "notched") + ":" +
         std::to_string(size_);
}

Brush make_brush(BrushShape shape, int size) {
  if (size < 1) throw std::invalid_argument("brush size must be >= 1");
  Mask fp(size, size, 0);
  if (shape == BrushShape::kCircular) {
    const double center = (size - 1) / 2.0;
    const double radius_sq = size * size / 4.0;
    for (int r = 0; r < size; ++r) {
      for (int c = 0; c < size; ++c) {
        const double dr = r - center, dc = c - center;
        fp(r, c) = dr * dr + dc * dc <= radius_sq;
      }
    }
  } else {
    fp.fill(1);
    if (size >= 3) {
      fp(0, 0) = fp(0, size - 1) = fp(size - 1, 0) = fp(size - 1, size - 1) = 0;
    }
  }
  const int anchor = (size - 1) / 2;
  return Brush(shape, size, std::move(fp), anchor, anchor);
}

BrushShape parse_brush_shape(std::string_view name) {
  if (name == "circle" || name == "circular") return BrushShape::kCircular;
  if (name == "notched" || name == "notched_square") return BrushShape::kNotchedSquare;
  throw std::invalid_argument("unknown brush shape '" + std::string(name) + "'");
}

std::string_view brush_shape_name(BrushShape shape) {
  return shape == BrushShape::kCircular ? "circle" : "notched";
}

Brush parse_brush(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("brush spec must look like 'circle:13', got '" +
                                std::string(spec) + "'");
  }
  const auto shape = parse_brush_shape(spec.substr(0, colon));
  const auto digits = spec.substr(colon + 1);
  int size = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), size);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    throw std::invalid_argument("invalid brush size in '" + std::string(spec) + "'");
  }
  return make_brush(shape, size);
}

int brush_width_for_rule(long width_nm, long pitch_nm) {
  if (width_nm <= 0 || pitch_nm <= 0) {
    throw std::invalid_argument("rule width and pixel pitch must be positive");
  }
  if (width_nm % pitch_nm != 0) {
    throw std::invalid_argument("rule width must be a whole number of pixels");
  }
  return static_cast<int>(width_nm / pitch_nm + 2);
}

BorderMode BorderMode::fixed(Grid<std::int8_t> frame, int margin) {
  if (margin < 1) throw std::invalid_argument("fixed border needs a positive margin");
  for (auto v : frame.data()) {
    if (v < -1 || v > 1) throw std::invalid_argument("frame values must be -1, 0 or +1");
  }
  BorderMode mode;
  mode.margin_ = margin;
  mode.frame_ = std::move(frame);
  return mode;
}

void BorderMode::check_shape(int rows, int cols) const {
  if (margin_ == 0) return;
  if (frame_.rows() != rows + 2 * margin_ || frame_.cols() != cols + 2 * margin_) {
    throw std::invalid_argument("border frame shape does not match the design");
  }
}

Mask dilate(const Mask& g, const Brush& b, const BorderMode& border, Phase phase) {
  if (g.empty()) throw std::invalid_argument("cannot dilate an empty grid");
  const auto ext = embed(g, border, phase);
  return crop(dilate_state(ext.state, b), ext.margin, g.rows(), g.cols());
}

Mask erode(const Mask& g, const Brush& b, const BorderMode& border, Phase phase) {
  if (g.empty()) throw std::invalid_argument("cannot erode an empty grid");
  const auto ext = embed(g, border, phase);
  return crop(erode_state(ext.state, b), ext.margin, g.rows(), g.cols());
}

Mask open(const Mask& g, const Brush& b, const BorderMode& border, Phase phase) {
  if (g.empty()) throw std::invalid_argument("cannot open an empty grid");
  const auto ext = embed(g, border, phase);
  const Mask touches = erode_state(ext.state, b);
  return crop(dilate_state(as_state(touches), b), ext.margin, g.rows(), g.cols());
}

bool is_feasible(const BinaryGrid& x, const Brush& b, const BorderMode& border) {
  const Mask solid = x.solid_mask();
  if (open(solid, b, border, Phase::kSolid) != solid) return false;
  const Mask vacant = x.void_mask();
  return open(vacant, b, border, Phase::kVoid) == vacant;
}

int minimum_length_scale(const BinaryGrid& x, BrushShape shape, const BorderMode& border) {
  const int limit = std::min(x.rows(), x.cols());
  int best = 0;
  for (int size = 1; size <= limit; ++size) {
    if (is_feasible(x, make_brush(shape, size), border)) best = size;
  }
  return best;
}

RunLengthStats run_length_stats(const BinaryGrid& x) {
  RunLengthStats stats;
  auto record = [&](bool solid, int length) {
    int& target = solid ? stats.min_solid_run : stats.min_void_run;
    auto& n = solid ? stats.solid_runs : stats.void_runs;
    target = n == 0 ? length : std::min(target, length);
    ++n;
  };
  auto scan = [&](int lines, int length, auto at) {
    for (int line = 0; line < lines; ++line) {
      int start = 0;
      for (int i = 1; i <= length; ++i) {
        if (i < length && at(line, i) == at(line, start)) continue;
        if (start > 0 && i < length) record(at(line, start) > 0, i - start);
        start = i;
      }
    }
  };
  scan(x.rows(), x.cols(), [&](int r, int c) { return x(r, c); });
  scan(x.cols(), x.rows(), [&](int c, int r) { return x(r, c); });
  return stats;
}

}  // namespace fabopt
