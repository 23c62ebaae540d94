#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "fabopt/grid.hpp"

namespace fabopt::fdfd {

using Complex = std::complex<double>;
using Field = Eigen::VectorXcd;

inline constexpr double kSilicon = 12.25;
inline constexpr double kOxide = 2.25;

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoSuchMode : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PmlSettings {
  int cells = 20;
  /// Stretch profile s(u) = 1 + i * strength * (u / cells)^2.
  double strength = 6.0;
};

/// Rectangular simulation domain. Permittivity is indexed (ix, iy): grid
/// rows run along x and columns along y. Lengths are in micrometres.
struct Domain {
  RealGrid eps;
  double pitch_um = 0.01;
  PmlSettings pml;

  int nx() const { return eps.rows(); }
  int ny() const { return eps.cols(); }
  void validate() const;
};

enum class Axis { kX, kY };

/// A waveguide cross-section. The reference plane sits at index `plane`
/// along `axis`; `outward` (+1 or -1) points from the device towards the
/// domain edge. The mode is solved over transverse cells [lo, hi).
struct Port {
  Axis axis = Axis::kX;
  int plane = 0;
  int outward = -1;
  int lo = 0;
  int hi = 0;
  int order = 1;  // 1 = fundamental, 2 = first odd mode
};

/// Guided mode of the discrete transverse operator d2/dt2 + k0^2 eps.
struct Mode {
  std::vector<double> profile;  // unit 2-norm over the window
  double beta2 = 0.0;           // eigenvalue (propagation constant squared)
  double kappa = 0.0;           // discrete longitudinal wavenumber
  double n_eff = 0.0;
};

/// Solves for the `order`-th guided mode on a line of permittivities with
/// zero field outside. Throws NoSuchMode when it is not guided.
Mode waveguide_mode(const std::vector<double>& eps_line, double wavelength_um, double pitch_um,
                    int order);

/// Factorized Ez Helmholtz operator at one wavelength, symmetrized by the
/// PML stretch factors so the same factorization serves forward and adjoint
/// solves. Not thread safe; create one per thread.
class Solver {
 public:
  Solver(const Domain& domain, double wavelength_um);
  ~Solver();
  Solver(Solver&&) noexcept;
  Solver& operator=(Solver&&) noexcept;

  /// Solves (laplacian + k0^2 eps) E = J with PML, i.e. M E = S J.
  Field solve(const Field& current) const;
  /// Solves M x = rhs directly (no stretch scaling).
  Field solve_scaled(const Field& rhs) const;
  /// Relative residual of the Helmholtz system for a field and its current.
  double residual(const Field& e, const Field& current) const;

  double k0() const { return k0_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int index(int ix, int iy) const { return ix * ny_ + iy; }
  /// Product of the two stretch factors at a cell centre.
  Complex stretch(int ix, int iy) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double k0_ = 0.0;
  int nx_ = 0, ny_ = 0;
};

/// Scattering amplitudes S[in][out] (zero-based port indices) at one
/// wavelength, with the per-port fields kept for adjoint gradients.
struct PortSolution {
  double wavelength_um = 0.0;
  std::vector<int> inputs;                 // excited port indices
  std::vector<std::vector<Complex>> s;     // s[k][q]: out port q for inputs[k]
  std::vector<Field> fields;               // forward field per excitation
  std::vector<Mode> modes;                 // per port
};

/// Ports and the per-port data shared by forward and adjoint evaluation.
class ScatteringProblem {
 public:
  ScatteringProblem(Domain domain, std::vector<Port> ports, double wavelength_um);

  /// Forward solves for each listed input port.
  PortSolution solve(const std::vector<int>& inputs) const;

  /// Gradient of a real loss with respect to cell permittivity, given
  /// dL/dRe S + i dL/dIm S laid out like `sol.s`.
  RealGrid permittivity_gradient(const PortSolution& sol,
                                 const std::vector<std::vector<Complex>>& dl_ds) const;

  /// Current sheet that launches port p's mode inward.
  Field source(int p) const;
  /// Weights w with S contribution w^T E for monitor q (S11 monitors sit two
  /// cells behind the source).
  Field monitor(int q, bool reflection) const;

  const Solver& solver() const { return solver_; }
  const Domain& domain() const { return domain_; }
  const std::vector<Port>& ports() const { return ports_; }
  const Mode& mode(int p) const { return modes_[p]; }
  double wavelength_um() const { return wavelength_um_; }

 private:
  Complex incident_amplitude(int p) const;
  double flux_scale(int p) const;
  std::vector<std::pair<int, double>> plane_cells(int p, int offset) const;

  Domain domain_;
  std::vector<Port> ports_;
  double wavelength_um_;
  Solver solver_;
  std::vector<Mode> modes_;
};

/// Line of permittivities across port p's window at its reference plane.
std::vector<double> port_line(const Domain& d, const Port& p);

}  // namespace fabopt::fdfd
