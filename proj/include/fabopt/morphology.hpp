#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fabopt/grid.hpp"

namespace fabopt {

enum class BrushShape { kCircular, kNotchedSquare };

enum class Phase : std::uint8_t { kSolid = 0, kVoid = 1 };

inline Phase opposite(Phase p) { return p == Phase::kSolid ? Phase::kVoid : Phase::kSolid; }

struct Offset {
  int dr = 0;
  int dc = 0;
  friend bool operator==(const Offset&, const Offset&) = default;
};

/// Horizontal run of footprint pixels at row offset `dr`, columns [dc_begin, dc_end].
struct BrushRun {
  int dr = 0;
  int dc_begin = 0;
  int dc_end = 0;
};

/// Binary structuring element. Offsets are relative to the anchor pixel,
/// which is the pixel the brush is centered on when placed as a touch.
class Brush {
 public:
  Brush(BrushShape shape, int size, Mask footprint, int anchor_row, int anchor_col);

  BrushShape shape() const { return shape_; }
  int size() const { return size_; }
  const Mask& footprint() const { return footprint_; }
  int anchor_row() const { return anchor_row_; }
  int anchor_col() const { return anchor_col_; }

  /// Footprint offsets in row-major footprint order.
  const std::vector<Offset>& offsets() const { return offsets_; }
  const std::vector<BrushRun>& runs() const { return runs_; }
  std::size_t pixel_count() const { return offsets_.size(); }

  /// Largest |dr| or |dc| over the footprint.
  int extent() const { return extent_; }

  /// Point reflection through the anchor (b -> -b).
  Brush reflected() const;
  bool symmetric() const;

  /// Canonical spec string, e.g. "circle:13" or "notched:10".
  std::string spec() const;

 private:
  BrushShape shape_;
  int size_;
  Mask footprint_;
  int anchor_row_;
  int anchor_col_;
  std::vector<Offset> offsets_;
  std::vector<BrushRun> runs_;
  int extent_ = 0;
};

/// Circular brush: pixel centers within L/2 of the footprint center.
/// Notched square: LxL with the four corner pixels removed when L >= 3.
Brush make_brush(BrushShape shape, int size);

/// Parses "circle:13", "circular:13", "notched:10" or "notched_square:10".
Brush parse_brush(std::string_view spec);
BrushShape parse_brush_shape(std::string_view name);
std::string_view brush_shape_name(BrushShape shape);

/// Notched-square width that guarantees a minimum width and spacing of
/// `width_nm` at pixel pitch `pitch_nm`: width/pitch + 2.
int brush_width_for_rule(long width_nm, long pitch_nm);

/// How pixels outside the grid are treated.
///
/// Padded: out-of-grid pixels are unconstrained; brush placements may overhang
/// the edge. Fixed: a frame of `margin` pixels around the grid carries frozen
/// values (+1 solid, -1 void, 0 unconstrained); beyond the frame the border
/// is padded. Morphology in fixed mode runs on the grid embedded in its frame.
class BorderMode {
 public:
  static BorderMode padded() { return BorderMode(); }
  /// `frame` has shape (rows + 2*margin, cols + 2*margin); its interior is ignored.
  static BorderMode fixed(Grid<std::int8_t> frame, int margin);

  bool is_padded() const { return margin_ == 0; }
  int margin() const { return margin_; }
  const Grid<std::int8_t>& frame() const { return frame_; }

  /// Throws unless the frame fits a design of the given shape.
  void check_shape(int rows, int cols) const;

 private:
  int margin_ = 0;
  Grid<std::int8_t> frame_;
};

/// Minkowski dilation: out[p] is set iff some set pixel q has p = q + o for
/// an offset o of the brush. For a symmetric brush this is "any set pixel
/// under the brush centered at p". `phase` selects which frame polarity
/// counts as set in fixed border mode.
Mask dilate(const Mask& g, const Brush& b, const BorderMode& border = BorderMode::padded(),
            Phase phase = Phase::kSolid);

/// Erosion: out[p] is set iff every pixel under the brush centered at p is
/// set. Unconstrained out-of-grid pixels count as set.
Mask erode(const Mask& g, const Brush& b, const BorderMode& border = BorderMode::padded(),
           Phase phase = Phase::kSolid);

/// dilate(erode(g)). In fixed mode the intermediate erosion keeps placements
/// centered in the frame.
Mask open(const Mask& g, const Brush& b, const BorderMode& border = BorderMode::padded(),
          Phase phase = Phase::kSolid);

/// Both phases are unions of brush placements: open(solid) == solid and
/// open(void) == void.
bool is_feasible(const BinaryGrid& x, const Brush& b,
                 const BorderMode& border = BorderMode::padded());

/// Largest L in 1..min(rows, cols) for which the design is feasible with the
/// size-L brush of the given shape. Feasibility is not monotone in L for
/// circular brushes (the size-3 circle is a full square that does not fit in
/// the size-4 circle), so every size is scanned.
int minimum_length_scale(const BinaryGrid& x, BrushShape shape,
                         const BorderMode& border = BorderMode::padded());

struct RunLengthStats {
  /// Shortest horizontal or vertical solid run that does not touch the grid edge.
  int min_solid_run = 0;
  /// Same for void runs.
  int min_void_run = 0;
  /// Number of interior runs of each phase considered.
  std::size_t solid_runs = 0;
  std::size_t void_runs = 0;
};

/// Run-length scan along rows and columns. Runs touching the grid edge are
/// skipped since they continue outside the design. Phases with no interior
/// run report 0.
RunLengthStats run_length_stats(const BinaryGrid& x);

}  // namespace fabopt
