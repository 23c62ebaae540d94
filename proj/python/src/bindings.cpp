// Python bindings. Designs are int8 numpy arrays (-1 void, +1 solid); reward
// and latent arrays are float64.

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fabopt/generator.hpp"
#include "fabopt/io.hpp"
#include "fabopt/morphology.hpp"
#include "fabopt/objective.hpp"
#include "fabopt/optimize.hpp"
#include "fabopt/problems.hpp"

namespace py = pybind11;
using namespace fabopt;

namespace {

using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using DesignArray = py::array_t<std::int8_t, py::array::c_style | py::array::forcecast>;

void require_2d(const py::array& a, const char* what) {
  if (a.ndim() != 2) throw py::value_error(std::string(what) + " must be a 2D array");
}

RealGrid to_real(const RealArray& a) {
  require_2d(a, "reward array");
  RealGrid g(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), g.data().begin());
  return g;
}

BinaryGrid to_design(const DesignArray& a) {
  require_2d(a, "design");
  return BinaryGrid::from_values(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)),
                                 std::vector<std::int8_t>(a.data(), a.data() + a.size()));
}

RealArray from_real(const RealGrid& g) {
  RealArray a({g.rows(), g.cols()});
  std::copy(g.data().begin(), g.data().end(), a.mutable_data());
  return a;
}

DesignArray from_design(const BinaryGrid& x) {
  DesignArray a({x.rows(), x.cols()});
  std::copy(x.values().data().begin(), x.values().data().end(), a.mutable_data());
  return a;
}

py::list s_to_list(const SVector& s) {
  py::list out;
  for (const auto& v : s) {
    out.append(py::dict(py::arg("out_port") = v.out_port, py::arg("in_port") = v.in_port,
                        py::arg("wavelength_nm") = v.wavelength_nm, py::arg("s") = v.s));
  }
  return out;
}

py::dict step_to_dict(const StepResult& r) {
  return py::dict(py::arg("step") = r.step, py::arg("design") = from_design(r.design),
                  py::arg("design_hash") = r.design_hash, py::arg("loss") = r.loss,
                  py::arg("spec_met") = r.spec_met, py::arg("feasible") = r.feasible);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Feasible-by-construction design generation and inverse design";

  py::class_<Brush>(m, "Brush")
      .def(py::init([](const std::string& spec) { return parse_brush(spec); }), py::arg("spec"))
      .def_property_readonly("size", &Brush::size)
      .def_property_readonly("shape", [](const Brush& b) { return std::string(brush_shape_name(b.shape())); })
      .def_property_readonly("spec", &Brush::spec)
      .def_property_readonly("footprint",
                             [](const Brush& b) {
                               const Mask& f = b.footprint();
                               py::array_t<bool> a({f.rows(), f.cols()});
                               std::copy(f.data().begin(), f.data().end(), a.mutable_data());
                               return a;
                             })
      .def("__repr__", [](const Brush& b) { return "Brush('" + b.spec() + "')"; });

  m.def("brush_width_for_rule", &brush_width_for_rule, py::arg("width_nm"), py::arg("pitch_nm"));

  m.def("random_reward", [](int rows, int cols, std::uint64_t seed) { return from_real(random_reward(rows, cols, seed)); },
        py::arg("rows"), py::arg("cols"), py::arg("seed"));

  m.def(
      "generate",
      [](const RealArray& theta, const Brush& b) {
        const RealGrid t = to_real(theta);
        py::gil_scoped_release release;
        BinaryGrid x = generate(t, b);
        py::gil_scoped_acquire acquire;
        return from_design(x);
      },
      py::arg("theta"), py::arg("brush"), "Feasible design for a reward array (padded border).");

  m.def(
      "is_feasible", [](const DesignArray& x, const Brush& b) { return is_feasible(to_design(x), b); },
      py::arg("design"), py::arg("brush"));

  m.def(
      "minimum_length_scale",
      [](const DesignArray& x, const std::string& shape) {
        return minimum_length_scale(to_design(x), parse_brush_shape(shape));
      },
      py::arg("design"), py::arg("shape") = "circle");

  m.def(
      "transform",
      [](const RealArray& latent, const Brush& b, double beta) {
        TransformConfig cfg;
        cfg.brush = b;
        cfg.beta = beta;
        return from_real(transform(to_real(latent), cfg));
      },
      py::arg("latent"), py::arg("brush"), py::arg("beta") = 4.0);

  m.def("problem_names", &standard_problem_names);

  m.def(
      "problem_shape",
      [](const std::string& name, double pitch_nm) {
        const ProblemDefinition p = standard_problem(name, pitch_nm);
        return py::make_tuple(p.design_rows(), p.design_cols());
      },
      py::arg("name"), py::arg("pitch_nm") = 20.0);

  m.def(
      "evaluate",
      [](const std::string& name, const DesignArray& design, double pitch_nm, bool with_gradient) {
        const ProblemDefinition p = standard_problem(name, pitch_nm);
        const BinaryGrid x = to_design(design);
        Evaluation ev;
        {
          py::gil_scoped_release release;
          ev = evaluate(p, x, with_gradient);
        }
        py::dict out(py::arg("loss") = ev.loss, py::arg("spec_met") = ev.spec_met, py::arg("s") = s_to_list(ev.s));
        if (with_gradient) out["gradient"] = from_real(ev.gradient);
        return out;
      },
      py::arg("problem"), py::arg("design"), py::arg("pitch_nm") = 20.0, py::arg("with_gradient") = false,
      "Simulate a design in a benchmark problem and score it against the problem's spec.");

  m.def(
      "optimize",
      [](const std::string& name, const Brush& b, double pitch_nm, int budget, std::uint64_t seed,
         bool stop_when_met, const std::function<void(py::dict)>& on_step) {
        const ProblemDefinition p = standard_problem(name, pitch_nm);
        OptimizeConfig cfg;
        cfg.transform.brush = b;
        cfg.transform.symmetry = p.symmetry();
        cfg.budget = budget;
        cfg.seed = seed;
        cfg.generator.seed = seed;
        cfg.stop_when_met = stop_when_met;
        const Trajectory t = run_optimization(p, cfg, [&](const StepResult& r) {
          if (on_step) on_step(step_to_dict(r));
        });
        py::list steps;
        for (const auto& r : t.steps) steps.append(step_to_dict(r));
        const auto met = t.first_met();
        return py::dict(py::arg("steps") = steps, py::arg("failed") = t.failed, py::arg("error") = t.error,
                        py::arg("first_met") = met ? py::object(py::int_(*met)) : py::object(py::none()));
      },
      py::arg("problem"), py::arg("brush"), py::arg("pitch_nm") = 20.0, py::arg("budget") = 300,
      py::arg("seed") = 0, py::arg("stop_when_met") = false, py::arg("on_step") = nullptr);

  m.def(
      "outline",
      [](const DesignArray& x, double pitch_nm) {
        const BinaryGrid d = to_design(x);
        return contours_to_json(outline(d), d, pitch_nm).dump();
      },
      py::arg("design"), py::arg("pitch_nm") = 10.0, "Polygon loops of the solid regions as a JSON string.");

  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);
}
