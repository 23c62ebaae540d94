#include "fabopt/objective.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace fabopt {

namespace {

constexpr double kWavelengthTol = 1e-6;

bool same_wavelength(double a, double b) { return std::abs(a - b) <= kWavelengthTol; }

}  // namespace

double SpecEntry::cutoff_amplitude() const { return std::pow(10.0, cutoff_db / 20.0); }

double SpecEntry::valid_range(ValidRangeUnits units) const {
  const double a = cutoff_amplitude();
  const double c = units == ValidRangeUnits::kAmplitude ? a : a * a;
  return bound == Bound::kAtLeast ? 1.0 - c : c;
}

double ScatteringSpec::min_valid_range() const {
  if (entries.empty()) throw std::invalid_argument("specification has no entries");
  double w = entries.front().valid_range(units);
  for (const auto& e : entries) w = std::min(w, e.valid_range(units));
  return w;
}

std::vector<double> ScatteringSpec::wavelengths_nm() const {
  std::vector<double> out;
  for (const auto& b : bands) out.insert(out.end(), b.wavelengths_nm.begin(), b.wavelengths_nm.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), same_wavelength), out.end());
  return out;
}

std::vector<int> ScatteringSpec::input_ports() const {
  std::set<int> ports;
  for (const auto& e : entries) ports.insert(e.in_port);
  return {ports.begin(), ports.end()};
}

ScatteringSpec ScatteringSpec::centers_only() const {
  ScatteringSpec out = *this;
  for (auto& b : out.bands) b.wavelengths_nm = {b.center_nm};
  return out;
}

void ScatteringSpec::validate() const {
  if (entries.empty()) throw std::invalid_argument("specification has no entries");
  for (const auto& b : bands) {
    if (b.wavelengths_nm.empty()) throw std::invalid_argument("band without wavelengths");
  }
  for (const auto& e : entries) {
    if (e.band < 0 || e.band >= static_cast<int>(bands.size())) {
      throw std::invalid_argument("spec entry refers to unknown band");
    }
    if (e.out_port < 1 || e.in_port < 1) throw std::invalid_argument("ports are numbered from 1");
    const double w = e.valid_range(units);
    if (!(w > 0.0)) throw std::invalid_argument("cutoff leaves no valid range");
  }
}

std::vector<std::size_t> align(const SVector& s, const ScatteringSpec& spec) {
  spec.validate();
  std::vector<std::size_t> idx;
  for (const auto& e : spec.entries) {
    for (double wl : spec.bands[e.band].wavelengths_nm) {
      auto it = std::find_if(s.begin(), s.end(), [&](const SValue& v) {
        return v.out_port == e.out_port && v.in_port == e.in_port && same_wavelength(v.wavelength_nm, wl);
      });
      if (it == s.end()) {
        throw std::invalid_argument("missing S" + std::to_string(e.out_port) + std::to_string(e.in_port) +
                                    " at " + std::to_string(wl) + " nm");
      }
      idx.push_back(static_cast<std::size_t>(it - s.begin()));
    }
  }
  return idx;
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double term_loss(Complex s, const SpecEntry& e, double min_w) {
  const double c = e.cutoff_amplitude();
  const double sp = softplus(e.sign() * (std::norm(s) - c * c) / min_w);
  return sp * sp;
}

Complex term_gradient(Complex s, const SpecEntry& e, double min_w) {
  const double c = e.cutoff_amplitude();
  const double z = e.sign() * (std::norm(s) - c * c) / min_w;
  // d|S|^2 in the (Re, Im) packing is 2 S.
  return 2.0 * softplus(z) * sigmoid(z) * e.sign() / min_w * 2.0 * s;
}

namespace {

// Visits every (entry, aligned sample index) pair.
template <typename F>
void for_each_term(const SVector& s, const ScatteringSpec& spec, F&& f) {
  const auto idx = align(s, spec);
  std::size_t k = 0;
  for (const auto& e : spec.entries) {
    for (std::size_t n = 0; n < spec.bands[e.band].wavelengths_nm.size(); ++n, ++k) f(idx[k], e);
  }
}

}  // namespace

double scattering_loss(const SVector& s, const ScatteringSpec& spec) {
  const double w = spec.min_valid_range();
  double loss = 0.0;
  for_each_term(s, spec, [&](std::size_t i, const SpecEntry& e) { loss += term_loss(s[i].s, e, w); });
  return loss;
}

std::vector<Complex> loss_gradient(const SVector& s, const ScatteringSpec& spec) {
  const double w = spec.min_valid_range();
  std::vector<Complex> grad(s.size());
  for_each_term(s, spec, [&](std::size_t i, const SpecEntry& e) { grad[i] += term_gradient(s[i].s, e, w); });
  return grad;
}

double power_db(Complex s) { return 10.0 * std::log10(std::norm(s)); }

bool spec_satisfied(const SVector& s, const ScatteringSpec& spec) {
  const auto idx = align(s, spec);
  std::size_t k = 0;
  bool ok = true;
  for (const auto& e : spec.entries) {
    for (std::size_t n = 0; n < spec.bands[e.band].wavelengths_nm.size(); ++n, ++k) {
      const double db = power_db(s[idx[k]].s);
      ok = ok && (e.bound == Bound::kAtMost ? db <= e.cutoff_db : db >= e.cutoff_db);
    }
  }
  return ok;
}

ScatteringSpec benchmark_spec(const std::string& component) {
  ScatteringSpec spec;
  spec.bands = {{1270.0, {1265.0, 1270.0, 1275.0}}, {1290.0, {1285.0, 1290.0, 1295.0}}};
  auto both = [&](int out, double db, Bound bound) {
    spec.entries.push_back({out, 1, 0, db, bound});
    spec.entries.push_back({out, 1, 1, db, bound});
  };
  constexpr auto kMax = Bound::kAtMost, kMin = Bound::kAtLeast;
  both(1, -20.0, kMax);
  if (component == "bend" || component == "mode_converter") {
    both(2, -0.5, kMin);
  } else if (component == "beamsplitter") {
    both(2, -3.5, kMin);
    both(3, -3.5, kMin);
    both(4, -20.0, kMax);
  } else if (component == "demultiplexer") {
    spec.entries.push_back({2, 1, 0, -3.0, kMin});
    spec.entries.push_back({2, 1, 1, -20.0, kMax});
    spec.entries.push_back({3, 1, 0, -20.0, kMax});
    spec.entries.push_back({3, 1, 1, -3.0, kMin});
  } else {
    throw std::invalid_argument("unknown component: " + component);
  }
  return spec;
}

nlohmann::json to_json(const ScatteringSpec& spec) {
  nlohmann::json j;
  j["units"] = spec.units == ValidRangeUnits::kAmplitude ? "amplitude" : "power";
  for (const auto& b : spec.bands) {
    j["bands"].push_back({{"center_nm", b.center_nm}, {"wavelengths_nm", b.wavelengths_nm}});
  }
  for (const auto& e : spec.entries) {
    j["entries"].push_back({{"out", e.out_port},
                            {"in", e.in_port},
                            {"band", e.band},
                            {"cutoff_db", e.cutoff_db},
                            {"bound", e.bound == Bound::kAtMost ? "max" : "min"}});
  }
  return j;
}

ScatteringSpec spec_from_json(const nlohmann::json& j) {
  ScatteringSpec spec;
  const std::string units = j.value("units", "amplitude");
  if (units == "amplitude") {
    spec.units = ValidRangeUnits::kAmplitude;
  } else if (units == "power") {
    spec.units = ValidRangeUnits::kPower;
  } else {
    throw std::invalid_argument("unknown valid-range units: " + units);
  }
  for (const auto& b : j.at("bands")) {
    WavelengthBand band;
    band.center_nm = b.at("center_nm").get<double>();
    band.wavelengths_nm = b.value("wavelengths_nm", std::vector<double>{band.center_nm});
    spec.bands.push_back(std::move(band));
  }
  for (const auto& e : j.at("entries")) {
    SpecEntry entry;
    entry.out_port = e.at("out").get<int>();
    entry.in_port = e.value("in", 1);
    entry.band = e.at("band").get<int>();
    entry.cutoff_db = e.at("cutoff_db").get<double>();
    const std::string bound = e.at("bound").get<std::string>();
    if (bound == "max") {
      entry.bound = Bound::kAtMost;
    } else if (bound == "min") {
      entry.bound = Bound::kAtLeast;
    } else {
      throw std::invalid_argument("bound must be \"max\" or \"min\"");
    }
    spec.entries.push_back(entry);
  }
  spec.validate();
  return spec;
}

}  // namespace fabopt
