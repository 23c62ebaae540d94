#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "fabopt/generator.hpp"
#include "fabopt/grid.hpp"
#include "fabopt/objective.hpp"
#include "fabopt/optimize.hpp"
#include "json.hpp"

namespace fabopt {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PgmFormat { kPlain, kRaw };  // P2, P5

/// PGM with 0 for void and maxval (255 on write) for solid. Reads P2 and P5;
/// any other gray level is rejected.
BinaryGrid read_pgm(std::istream& in);
void write_pgm(std::ostream& out, const BinaryGrid& x, PgmFormat format = PgmFormat::kPlain);

/// Comma-separated rows of -1 / +1.
BinaryGrid read_csv(std::istream& in);
void write_csv(std::ostream& out, const BinaryGrid& x);

/// Chooses the format from the extension (.pgm or .csv).
BinaryGrid read_design(const std::filesystem::path& path);
void write_design(const std::filesystem::path& path, const BinaryGrid& x);

/// Real grid as CSV with full round-trip precision.
void write_real_csv(std::ostream& out, const RealGrid& g);

/// Closed pixel-edge loop. Vertices are pixel corners (x = row, y = column),
/// not repeated at the end, with collinear points removed. Solid lies to the
/// left of travel: outer boundaries run counterclockwise, holes clockwise.
struct Contour {
  std::vector<std::array<int, 2>> vertices;
  bool hole = false;
};

/// Outlines every 4-connected solid region. Diagonal-only contacts are
/// kept as separate loops.
std::vector<Contour> outline(const BinaryGrid& x);
/// Twice the signed area (positive for counterclockwise).
long long signed_area2(const Contour& c);
/// {"units": "nm", "pitch_nm", "rows", "cols", "loops": [{"orientation", "hole", "vertices"}]}
nlohmann::json contours_to_json(const std::vector<Contour>& loops, const BinaryGrid& x, double pitch_nm);

/// step, loss, spec_ok, feasible, design_hash
void write_trajectory_csv(std::ostream& out, const Trajectory& t);
/// wavelength_nm, out_port, in_port, power_db
void write_spectra_csv(std::ostream& out, const SVector& s);

nlohmann::json to_json(const StepRecord& r);
nlohmann::json to_json(const StepResult& r);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

}  // namespace fabopt
