#pragma once

#include <string>
#include <vector>

#include "fabopt/fdfd.hpp"
#include "fabopt/grid.hpp"
#include "fabopt/morphology.hpp"
#include "fabopt/objective.hpp"
#include "json.hpp"

namespace fabopt {

/// Mirror symmetries imposed on the design (design grid rows are x).
enum class Symmetry {
  kDiagonal,  // x <-> y (transpose); requires a square design
  kMirrorX,   // x -> -x (reverse rows)
  kMirrorY,   // y -> -y (reverse columns)
};

enum class Side { kLeft, kRight, kBottom, kTop };  // -x, +x, -y, +y

/// A waveguide attached to one side of the design region.
struct PortLayout {
  Side side = Side::kLeft;
  double offset_um = 0.0;  // along the side, from the design-region centre
  int order = 1;
};

/// Physical description of a component; all lengths in micrometres.
struct ProblemGeometry {
  std::string name;
  double design_x_um = 1.6;
  double design_y_um = 1.6;
  double waveguide_width_um = 0.4;
  double stub_um = 0.5;  // design edge to port reference plane
  std::vector<PortLayout> ports;
  std::vector<Symmetry> symmetry;
  ScatteringSpec spec;
};

/// Geometry instantiated on a pixel grid, with the simulation domain built
/// around the design region.
class ProblemDefinition {
 public:
  ProblemDefinition(ProblemGeometry geometry, double pitch_nm, fdfd::PmlSettings pml = {});

  const std::string& name() const { return geometry_.name; }
  const ProblemGeometry& geometry() const { return geometry_; }
  double pitch_nm() const { return pitch_nm_; }
  double pitch_um() const { return pitch_nm_ / 1000.0; }
  int design_rows() const { return rows_; }
  int design_cols() const { return cols_; }
  const std::vector<Symmetry>& symmetry() const { return geometry_.symmetry; }
  const ScatteringSpec& spec() const { return geometry_.spec; }
  const std::vector<fdfd::Port>& ports() const { return ports_; }
  int design_x0() const { return x0_; }
  int design_y0() const { return y0_; }

  /// Domain permittivity with the design region left as oxide.
  const fdfd::Domain& background() const { return background_; }
  /// Domain permittivity with the design inserted (solid -> silicon).
  fdfd::Domain domain(const BinaryGrid& design) const;
  /// Fixed border for the generator: waveguide stubs are solid, cladding is
  /// void, over a `margin`-pixel ring around the design.
  BorderMode border(int margin) const;

 private:
  ProblemGeometry geometry_;
  double pitch_nm_;
  int rows_ = 0, cols_ = 0, x0_ = 0, y0_ = 0;
  fdfd::Domain background_;
  std::vector<fdfd::Port> ports_;
};

/// One of the four benchmarks: bend, mode_converter, beamsplitter,
/// demultiplexer. Throws std::invalid_argument for unknown names or a pitch
/// that does not divide the geometry.
ProblemGeometry standard_geometry(const std::string& name);
ProblemDefinition standard_problem(const std::string& name, double pitch_nm);
std::vector<std::string> standard_problem_names();

ProblemGeometry geometry_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProblemGeometry& g);

/// Simulated performance of one design.
struct Evaluation {
  SVector s;           // every (out, in) pair at every spec wavelength
  double loss = 0.0;
  bool spec_met = false;
  RealGrid gradient;   // dL/dx per design pixel, x = +1 solid / -1 void; empty unless requested
};

/// Runs the forward (and, when `with_gradient`, adjoint) simulations at
/// every wavelength of the problem's spec.
Evaluation evaluate(const ProblemDefinition& problem, const BinaryGrid& design, bool with_gradient);

/// Permittivity change per unit change of the +-1 pixel value.
inline constexpr double kPermittivityPerPixel = (fdfd::kSilicon - fdfd::kOxide) / 2.0;

std::string symmetry_name(Symmetry s);
Symmetry parse_symmetry(const std::string& s);

}  // namespace fabopt
