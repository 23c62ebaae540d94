#include "fabopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fabopt {

namespace {

// Whole number of pixels in `um` at pitch `p_um`.
int cells(double um, double p_um, const char* what) {
  const double n = um / p_um;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-6) {
    throw std::invalid_argument(std::string("pitch does not divide the ") + what);
  }
  return static_cast<int>(r);
}

bool along_x(Side s) { return s == Side::kLeft || s == Side::kRight; }

}  // namespace

std::string symmetry_name(Symmetry s) {
  switch (s) {
    case Symmetry::kDiagonal: return "diagonal";
    case Symmetry::kMirrorX: return "mirror_x";
    case Symmetry::kMirrorY: return "mirror_y";
  }
  return "?";
}

Symmetry parse_symmetry(const std::string& s) {
  if (s == "diagonal") return Symmetry::kDiagonal;
  if (s == "mirror_x") return Symmetry::kMirrorX;
  if (s == "mirror_y") return Symmetry::kMirrorY;
  throw std::invalid_argument("unknown symmetry: " + s);
}

ProblemDefinition::ProblemDefinition(ProblemGeometry geometry, double pitch_nm, fdfd::PmlSettings pml)
    : geometry_(std::move(geometry)), pitch_nm_(pitch_nm) {
  if (!(pitch_nm > 0)) throw std::invalid_argument("pitch must be positive");
  if (geometry_.ports.empty()) throw std::invalid_argument("problem has no ports");
  geometry_.spec.validate();
  const double p = pitch_um();
  rows_ = cells(geometry_.design_x_um, p, "design width");
  cols_ = cells(geometry_.design_y_um, p, "design height");
  const int w = cells(geometry_.waveguide_width_um, p, "waveguide width");
  const int stub = cells(geometry_.stub_um, p, "stub length");
  const int window = cells(0.4, p, "mode window");
  for (auto s : geometry_.symmetry) {
    if (s == Symmetry::kDiagonal && rows_ != cols_) {
      throw std::invalid_argument("diagonal symmetry needs a square design");
    }
  }
  // Source pair plus reflection monitor need three cells behind the plane.
  const int margin = stub + 3;
  x0_ = pml.cells + margin;
  y0_ = pml.cells + margin;
  const int nx = rows_ + 2 * x0_, ny = cols_ + 2 * y0_;
  background_.pitch_um = p;
  background_.pml = pml;
  background_.eps = RealGrid(nx, ny, fdfd::kOxide);

  for (const auto& port : geometry_.ports) {
    const bool x_axis = along_x(port.side);
    const int span = x_axis ? cols_ : rows_;
    const int t0 = x_axis ? y0_ : x0_;
    const int n_cross = x_axis ? ny : nx;
    const int lo = t0 + cells(span * p / 2.0 + port.offset_um - geometry_.waveguide_width_um / 2.0, p,
                              "port offset");
    if (lo < t0 || lo + w > t0 + span) throw std::invalid_argument("port lies outside the design side");
    int from = 0, to = 0, plane = 0, outward = 0;
    switch (port.side) {
      case Side::kLeft: from = 0, to = x0_, plane = x0_ - stub, outward = -1; break;
      case Side::kRight: from = x0_ + rows_, to = nx, plane = x0_ + rows_ - 1 + stub, outward = 1; break;
      case Side::kBottom: from = 0, to = y0_, plane = y0_ - stub, outward = -1; break;
      case Side::kTop: from = y0_ + cols_, to = ny, plane = y0_ + cols_ - 1 + stub, outward = 1; break;
    }
    for (int a = from; a < to; ++a) {
      for (int t = lo; t < lo + w; ++t) {
        if (x_axis) {
          background_.eps(a, t) = fdfd::kSilicon;
        } else {
          background_.eps(t, a) = fdfd::kSilicon;
        }
      }
    }
    fdfd::Port fp;
    fp.axis = x_axis ? fdfd::Axis::kX : fdfd::Axis::kY;
    fp.plane = plane;
    fp.outward = outward;
    fp.lo = std::max(pml.cells, lo - window);
    fp.hi = std::min(n_cross - pml.cells, lo + w + window);
    fp.order = port.order;
    ports_.push_back(fp);
  }
  background_.validate();
}

fdfd::Domain ProblemDefinition::domain(const BinaryGrid& design) const {
  if (design.rows() != rows_ || design.cols() != cols_) {
    throw std::invalid_argument("design shape does not match the problem");
  }
  fdfd::Domain d = background_;
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) {
      d.eps(x0_ + i, y0_ + j) = design(i, j) > 0 ? fdfd::kSilicon : fdfd::kOxide;
    }
  }
  return d;
}

BorderMode ProblemDefinition::border(int margin) const {
  if (margin < 1 || margin > x0_ || margin > y0_) throw std::invalid_argument("bad border margin");
  Grid<std::int8_t> frame(rows_ + 2 * margin, cols_ + 2 * margin, 0);
  for (int i = 0; i < frame.rows(); ++i) {
    for (int j = 0; j < frame.cols(); ++j) {
      const double e = background_.eps(x0_ - margin + i, y0_ - margin + j);
      frame(i, j) = e > fdfd::kOxide ? 1 : -1;
    }
  }
  return BorderMode::fixed(std::move(frame), margin);
}

std::vector<std::string> standard_problem_names() {
  return {"bend", "mode_converter", "beamsplitter", "demultiplexer"};
}

ProblemGeometry standard_geometry(const std::string& name) {
  ProblemGeometry g;
  g.name = name;
  g.spec = benchmark_spec(name);  // validates the name
  if (name == "bend") {
    g.ports = {{Side::kLeft, 0.0, 1}, {Side::kBottom, 0.0, 1}};
    g.symmetry = {Symmetry::kDiagonal};
  } else if (name == "mode_converter") {
    g.ports = {{Side::kLeft, 0.0, 1}, {Side::kRight, 0.0, 2}};
  } else if (name == "beamsplitter") {
    g.design_x_um = 3.2;
    g.design_y_um = 2.0;
    g.ports = {{Side::kLeft, 0.6, 1}, {Side::kRight, 0.6, 1}, {Side::kRight, -0.6, 1}, {Side::kLeft, -0.6, 1}};
    g.symmetry = {Symmetry::kMirrorX, Symmetry::kMirrorY};
  } else {
    g.design_x_um = 6.4;
    g.design_y_um = 6.4;
    g.ports = {{Side::kLeft, 0.0, 1}, {Side::kRight, 1.2, 1}, {Side::kRight, -1.2, 1}};
  }
  return g;
}

ProblemDefinition standard_problem(const std::string& name, double pitch_nm) {
  return ProblemDefinition(standard_geometry(name), pitch_nm);
}

namespace {

const char* side_name(Side s) {
  switch (s) {
    case Side::kLeft: return "left";
    case Side::kRight: return "right";
    case Side::kBottom: return "bottom";
    case Side::kTop: return "top";
  }
  return "?";
}

Side parse_side(const std::string& s) {
  if (s == "left") return Side::kLeft;
  if (s == "right") return Side::kRight;
  if (s == "bottom") return Side::kBottom;
  if (s == "top") return Side::kTop;
  throw std::invalid_argument("unknown side: " + s);
}

}  // namespace

nlohmann::json to_json(const ProblemGeometry& g) {
  nlohmann::json j;
  j["name"] = g.name;
  j["design_um"] = {g.design_x_um, g.design_y_um};
  j["waveguide_width_um"] = g.waveguide_width_um;
  j["stub_um"] = g.stub_um;
  j["ports"] = nlohmann::json::array();
  for (const auto& p : g.ports) {
    j["ports"].push_back({{"side", side_name(p.side)}, {"offset_um", p.offset_um}, {"order", p.order}});
  }
  j["symmetry"] = nlohmann::json::array();
  for (auto s : g.symmetry) j["symmetry"].push_back(symmetry_name(s));
  j["spec"] = to_json(g.spec);
  return j;
}

ProblemGeometry geometry_from_json(const nlohmann::json& j) {
  ProblemGeometry g;
  g.name = j.value("name", "custom");
  const auto size = j.at("design_um").get<std::vector<double>>();
  if (size.size() != 2) throw std::invalid_argument("design_um must have two entries");
  g.design_x_um = size[0];
  g.design_y_um = size[1];
  g.waveguide_width_um = j.value("waveguide_width_um", 0.4);
  g.stub_um = j.value("stub_um", 0.5);
  for (const auto& p : j.at("ports")) {
    g.ports.push_back({parse_side(p.at("side").get<std::string>()), p.value("offset_um", 0.0), p.value("order", 1)});
  }
  for (const auto& s : j.value("symmetry", nlohmann::json::array())) g.symmetry.push_back(parse_symmetry(s));
  g.spec = j.contains("spec") ? spec_from_json(j.at("spec")) : benchmark_spec(g.name);
  return g;
}

Evaluation evaluate(const ProblemDefinition& problem, const BinaryGrid& design, bool with_gradient) {
  const auto& spec = problem.spec();
  const double min_w = spec.min_valid_range();
  const fdfd::Domain dom = problem.domain(design);
  std::vector<int> inputs;
  for (int p : spec.input_ports()) {
    if (p > static_cast<int>(problem.ports().size())) throw std::invalid_argument("spec names a missing port");
    inputs.push_back(p - 1);
  }
  const int np = static_cast<int>(problem.ports().size());
  Evaluation ev;
  if (with_gradient) ev.gradient = RealGrid(problem.design_rows(), problem.design_cols(), 0.0);

  for (double wl : spec.wavelengths_nm()) {
    const fdfd::ScatteringProblem sim(dom, problem.ports(), wl / 1000.0);
    const auto sol = sim.solve(inputs);
    std::vector<std::vector<Complex>> dl_ds(inputs.size(), std::vector<Complex>(np));
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      for (int q = 0; q < np; ++q) ev.s.push_back({q + 1, inputs[k] + 1, wl, sol.s[k][q]});
    }
    if (!with_gradient) continue;
    for (const auto& e : spec.entries) {
      const auto& band = spec.bands[e.band].wavelengths_nm;
      const bool here = std::any_of(band.begin(), band.end(), [&](double b) { return std::abs(b - wl) < 1e-6; });
      if (!here) continue;
      const auto k = static_cast<std::size_t>(std::find(inputs.begin(), inputs.end(), e.in_port - 1) - inputs.begin());
      dl_ds[k][e.out_port - 1] += term_gradient(sol.s[k][e.out_port - 1], e, min_w);
    }
    const RealGrid g = sim.permittivity_gradient(sol, dl_ds);
    for (int i = 0; i < problem.design_rows(); ++i) {
      for (int j = 0; j < problem.design_cols(); ++j) {
        ev.gradient(i, j) += kPermittivityPerPixel * g(problem.design_x0() + i, problem.design_y0() + j);
      }
    }
  }
  ev.loss = scattering_loss(ev.s, spec);
  ev.spec_met = spec_satisfied(ev.s, spec);
  return ev;
}

}  // namespace fabopt
