#include "fabopt/fdfd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#ifdef FABOPT_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#else
#include <Eigen/SparseLU>
#endif

namespace fabopt::fdfd {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

void Domain::validate() const {
  if (!(pitch_um > 0.0)) throw std::invalid_argument("pitch must be positive");
  if (pml.cells < 1 || 2 * pml.cells + 1 > std::min(nx(), ny())) {
    throw std::invalid_argument("domain too small for its PML");
  }
  for (double e : eps.data()) {
    if (!(e >= 1.0)) throw std::invalid_argument("permittivity below 1");
  }
}

Mode waveguide_mode(const std::vector<double>& eps_line, double wavelength_um, double pitch_um,
                    int order) {
  const int n = static_cast<int>(eps_line.size());
  if (order < 1 || order > n) throw NoSuchMode("mode order out of range");
  const double k0 = 2.0 * std::numbers::pi / wavelength_um;
  const double h2 = pitch_um * pitch_um;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    t(i, i) = -2.0 / h2 + k0 * k0 * eps_line[i];
    if (i + 1 < n) t(i, i + 1) = t(i + 1, i) = 1.0 / h2;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  if (es.info() != Eigen::Success) throw NoSuchMode("mode eigensolver failed");
  // Eigenvalues ascend; the fundamental has the largest.
  const int k = n - order;
  Mode m;
  m.beta2 = es.eigenvalues()(k);
  const double clad = std::max(eps_line.front(), eps_line.back());
  if (m.beta2 <= k0 * k0 * clad) {
    throw NoSuchMode("mode " + std::to_string(order) + " is not guided");
  }
  m.n_eff = std::sqrt(m.beta2) / k0;
  const double c = 1.0 - m.beta2 * h2 / 2.0;
  if (c <= -1.0) throw NoSuchMode("grid too coarse for the mode");
  m.kappa = std::acos(c) / pitch_um;
  Eigen::VectorXd v = es.eigenvectors().col(k);
  v.normalize();
  // Sign convention: the first sizeable lobe is positive.
  const double peak = v.cwiseAbs().maxCoeff();
  for (int i = 0; i < n; ++i) {
    if (std::abs(v(i)) > 0.5 * peak) {
      if (v(i) < 0) v = -v;
      break;
    }
  }
  m.profile.assign(v.data(), v.data() + n);
  return m;
}

namespace {

// Stretch factor at a (possibly half-integer) position measured in cells
// from the low domain edge; cell centres sit at i + 0.5.
Complex stretch_at(double pos, int n, const PmlSettings& pml) {
  const double depth = std::max({0.0, pml.cells - pos, pos - (n - pml.cells)});
  const double u = depth / pml.cells;
  return {1.0, pml.strength * u * u};
}

}  // namespace

struct Solver::Impl {
  SparseMatrix m;
  std::vector<Complex> sx_c, sy_c;
#ifdef FABOPT_HAVE_UMFPACK
  Eigen::UmfPackLU<SparseMatrix> lu;
#else
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
#endif
};

Solver::Solver(const Domain& domain, double wavelength_um) : impl_(std::make_unique<Impl>()) {
  domain.validate();
  nx_ = domain.nx();
  ny_ = domain.ny();
  k0_ = 2.0 * std::numbers::pi / wavelength_um;
  const double inv_h2 = 1.0 / (domain.pitch_um * domain.pitch_um);
  auto& im = *impl_;
  im.sx_c.resize(nx_);
  im.sy_c.resize(ny_);
  std::vector<Complex> sx_h(nx_ + 1), sy_h(ny_ + 1);  // [i] is the face at i
  for (int i = 0; i < nx_; ++i) im.sx_c[i] = stretch_at(i + 0.5, nx_, domain.pml);
  for (int j = 0; j < ny_; ++j) im.sy_c[j] = stretch_at(j + 0.5, ny_, domain.pml);
  for (int i = 0; i <= nx_; ++i) sx_h[i] = stretch_at(i, nx_, domain.pml);
  for (int j = 0; j <= ny_; ++j) sy_h[j] = stretch_at(j, ny_, domain.pml);

  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(static_cast<std::size_t>(nx_) * ny_ * 5);
  for (int i = 0; i < nx_; ++i) {
    for (int j = 0; j < ny_; ++j) {
      const int k = index(i, j);
      const Complex ax_lo = im.sy_c[j] / sx_h[i] * inv_h2, ax_hi = im.sy_c[j] / sx_h[i + 1] * inv_h2;
      const Complex ay_lo = im.sx_c[i] / sy_h[j] * inv_h2, ay_hi = im.sx_c[i] / sy_h[j + 1] * inv_h2;
      const Complex diag =
          k0_ * k0_ * domain.eps(i, j) * im.sx_c[i] * im.sy_c[j] - ax_lo - ax_hi - ay_lo - ay_hi;
      trip.emplace_back(k, k, diag);
      if (i > 0) trip.emplace_back(k, index(i - 1, j), ax_lo);
      if (i + 1 < nx_) trip.emplace_back(k, index(i + 1, j), ax_hi);
      if (j > 0) trip.emplace_back(k, index(i, j - 1), ay_lo);
      if (j + 1 < ny_) trip.emplace_back(k, index(i, j + 1), ay_hi);
    }
  }
  im.m.resize(nx_ * ny_, nx_ * ny_);
  im.m.setFromTriplets(trip.begin(), trip.end());
  im.m.makeCompressed();
  im.lu.compute(im.m);
  if (im.lu.info() != Eigen::Success) throw SolverError("sparse factorization failed");
}

Solver::~Solver() = default;
Solver::Solver(Solver&&) noexcept = default;
Solver& Solver::operator=(Solver&&) noexcept = default;

Complex Solver::stretch(int ix, int iy) const { return impl_->sx_c[ix] * impl_->sy_c[iy]; }

Field Solver::solve_scaled(const Field& rhs) const {
  Field x = impl_->lu.solve(rhs);
  if (impl_->lu.info() != Eigen::Success) throw SolverError("sparse solve failed");
  const double r = (impl_->m * x - rhs).norm() / std::max(rhs.norm(), 1e-300);
  if (!(r < 1e-8)) throw SolverError("solve residual " + std::to_string(r) + " above 1e-8");
  return x;
}

Field Solver::solve(const Field& current) const {
  Field rhs(current.size());
  for (int i = 0; i < nx_; ++i) {
    for (int j = 0; j < ny_; ++j) rhs(index(i, j)) = stretch(i, j) * current(index(i, j));
  }
  return solve_scaled(rhs);
}

double Solver::residual(const Field& e, const Field& current) const {
  Field rhs(current.size());
  for (int i = 0; i < nx_; ++i) {
    for (int j = 0; j < ny_; ++j) rhs(index(i, j)) = stretch(i, j) * current(index(i, j));
  }
  return (impl_->m * e - rhs).norm() / std::max(rhs.norm(), 1e-300);
}

std::vector<double> port_line(const Domain& d, const Port& p) {
  std::vector<double> line;
  for (int t = p.lo; t < p.hi; ++t) line.push_back(p.axis == Axis::kX ? d.eps(p.plane, t) : d.eps(t, p.plane));
  return line;
}

ScatteringProblem::ScatteringProblem(Domain domain, std::vector<Port> ports, double wavelength_um)
    : domain_(std::move(domain)),
      ports_(std::move(ports)),
      wavelength_um_(wavelength_um),
      solver_(domain_, wavelength_um) {
  const int pml = domain_.pml.cells;
  for (const auto& p : ports_) {
    const int n_axis = p.axis == Axis::kX ? domain_.nx() : domain_.ny();
    const int n_cross = p.axis == Axis::kX ? domain_.ny() : domain_.nx();
    const int behind = p.plane + 2 * p.outward;
    if (p.outward != 1 && p.outward != -1) throw std::invalid_argument("port outward must be +-1");
    if (behind < pml || behind >= n_axis - pml || p.plane < pml || p.plane >= n_axis - pml) {
      throw std::invalid_argument("port planes must lie outside the PML");
    }
    if (p.lo < 0 || p.hi > n_cross || p.hi - p.lo < 3) throw std::invalid_argument("bad port window");
    modes_.push_back(waveguide_mode(port_line(domain_, p), wavelength_um_, domain_.pitch_um, p.order));
  }
}

std::vector<std::pair<int, double>> ScatteringProblem::plane_cells(int p, int offset) const {
  const Port& port = ports_[p];
  const Mode& m = modes_[p];
  const int plane = port.plane + offset * port.outward;
  std::vector<std::pair<int, double>> out;
  for (int t = port.lo; t < port.hi; ++t) {
    const int k = port.axis == Axis::kX ? solver_.index(plane, t) : solver_.index(t, plane);
    out.emplace_back(k, m.profile[t - port.lo]);
  }
  return out;
}

Complex ScatteringProblem::incident_amplitude(int p) const {
  // Modal amplitude launched by the unit source pair: the discrete Green's
  // function d^2 / (2i sin(kappa d)) times (1 - e^{2i kappa d}).
  const double kd = modes_[p].kappa * domain_.pitch_um;
  const Complex g = domain_.pitch_um * domain_.pitch_um / (Complex(0.0, 2.0) * std::sin(kd));
  return g * (1.0 - std::exp(Complex(0.0, 2.0 * kd)));
}

double ScatteringProblem::flux_scale(int p) const {
  return std::sin(modes_[p].kappa * domain_.pitch_um);
}

Field ScatteringProblem::source(int p) const {
  Field j = Field::Zero(static_cast<Eigen::Index>(domain_.nx()) * domain_.ny());
  const Complex back = -std::exp(Complex(0.0, modes_[p].kappa * domain_.pitch_um));
  for (auto [k, v] : plane_cells(p, 0)) j(k) += v;
  for (auto [k, v] : plane_cells(p, 1)) j(k) += back * v;
  return j;
}

Field ScatteringProblem::monitor(int q, bool reflection) const {
  Field w = Field::Zero(static_cast<Eigen::Index>(domain_.nx()) * domain_.ny());
  for (auto [k, v] : plane_cells(q, reflection ? 2 : 0)) w(k) = v;
  return w;
}

PortSolution ScatteringProblem::solve(const std::vector<int>& inputs) const {
  PortSolution sol;
  sol.wavelength_um = wavelength_um_;
  sol.inputs = inputs;
  sol.modes = modes_;
  const int np = static_cast<int>(ports_.size());
  for (int p : inputs) {
    if (p < 0 || p >= np) throw std::invalid_argument("input port out of range");
    Field e = solver_.solve(source(p));
    const Complex a_inc = incident_amplitude(p);
    std::vector<Complex> row(np);
    for (int q = 0; q < np; ++q) {
      const Complex overlap = monitor(q, q == p).dot(e);  // dot conjugates the left side; weights are real
      const double scale = q == p ? 1.0 : std::sqrt(flux_scale(q) / flux_scale(p));
      row[q] = overlap / a_inc * scale;
    }
    sol.s.push_back(std::move(row));
    sol.fields.push_back(std::move(e));
  }
  return sol;
}

RealGrid ScatteringProblem::permittivity_gradient(const PortSolution& sol,
                                                  const std::vector<std::vector<Complex>>& dl_ds) const {
  if (dl_ds.size() != sol.inputs.size()) throw std::invalid_argument("gradient layout mismatch");
  RealGrid grad(domain_.nx(), domain_.ny(), 0.0);
  const double k2 = solver_.k0() * solver_.k0();
  const int np = static_cast<int>(ports_.size());
  for (std::size_t k = 0; k < sol.inputs.size(); ++k) {
    const int p = sol.inputs[k];
    if (static_cast<int>(dl_ds[k].size()) != np) throw std::invalid_argument("gradient layout mismatch");
    Field rhs = Field::Zero(sol.fields[k].size());
    bool any = false;
    const Complex a_inc = incident_amplitude(p);
    for (int q = 0; q < np; ++q) {
      if (dl_ds[k][q] == Complex(0.0)) continue;
      any = true;
      const double scale = q == p ? 1.0 : std::sqrt(flux_scale(q) / flux_scale(p));
      rhs += std::conj(dl_ds[k][q]) * (scale / a_inc) * monitor(q, q == p);
    }
    if (!any) continue;
    const Field lambda = solver_.solve_scaled(rhs);
    const Field& e = sol.fields[k];
    for (int i = 0; i < domain_.nx(); ++i) {
      for (int j = 0; j < domain_.ny(); ++j) {
        const int c = solver_.index(i, j);
        grad(i, j) -= k2 * (lambda(c) * solver_.stretch(i, j) * e(c)).real();
      }
    }
  }
  return grad;
}

}  // namespace fabopt::fdfd
