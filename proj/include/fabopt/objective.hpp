#pragma once

#include <complex>
#include <string>
#include <vector>

#include "json.hpp"

namespace fabopt {

using Complex = std::complex<double>;

/// Whether a cutoff bounds |S|^2 from above (reflection, crosstalk) or from
/// below (transmission).
enum class Bound { kAtMost, kAtLeast };

/// Units in which the valid range w_valid is measured. Amplitude follows the
/// worked example (cutoff 0.5 amplitude -> w_valid 0.5); power measures the
/// distance in |S|^2.
enum class ValidRangeUnits { kAmplitude, kPower };

struct WavelengthBand {
  double center_nm = 0.0;
  std::vector<double> wavelengths_nm;  // sample points used for loss and checks
};

/// One cell of a specification table: |S_{out,in}|^2 compared to a dB cutoff
/// over every wavelength of a band.
struct SpecEntry {
  int out_port = 1;
  int in_port = 1;
  int band = 0;
  double cutoff_db = 0.0;
  Bound bound = Bound::kAtMost;

  double cutoff_amplitude() const;
  /// +1 for upper bounds, -1 for lower bounds.
  double sign() const { return bound == Bound::kAtMost ? 1.0 : -1.0; }
  double valid_range(ValidRangeUnits units) const;
};

struct ScatteringSpec {
  std::vector<WavelengthBand> bands;
  std::vector<SpecEntry> entries;
  ValidRangeUnits units = ValidRangeUnits::kAmplitude;

  /// Smallest valid range over all entries; normalizes the loss.
  double min_valid_range() const;
  /// Sorted, deduplicated union of band wavelengths.
  std::vector<double> wavelengths_nm() const;
  /// Input ports that appear in any entry.
  std::vector<int> input_ports() const;
  /// Copy whose bands are sampled only at their centers.
  ScatteringSpec centers_only() const;
  void validate() const;
};

/// One complex scattering amplitude.
struct SValue {
  int out_port = 1;
  int in_port = 1;
  double wavelength_nm = 0.0;
  Complex s;
};
using SVector = std::vector<SValue>;

/// Position in an SVector of the sample each (entry, band wavelength) pair
/// refers to, in entry-major order. Throws std::invalid_argument when a
/// sample is missing.
std::vector<std::size_t> align(const SVector& s, const ScatteringSpec& spec);

double softplus(double z);
double sigmoid(double z);

/// Sum over aligned samples of softplus(g (|S|^2 - |S_c|^2) / min w)^2.
double scattering_loss(const SVector& s, const ScatteringSpec& spec);

/// dL/dRe(S) + i dL/dIm(S) for every entry of `s` (zero where unused).
std::vector<Complex> loss_gradient(const SVector& s, const ScatteringSpec& spec);

/// Loss contribution and gradient of one sample against one entry, with the
/// normalization `min_w` taken from the whole specification.
double term_loss(Complex s, const SpecEntry& e, double min_w);
Complex term_gradient(Complex s, const SpecEntry& e, double min_w);

/// True iff every cutoff holds at every band wavelength.
bool spec_satisfied(const SVector& s, const ScatteringSpec& spec);

double power_db(Complex s);

/// The O-band benchmark targets: bands centered at 1270 and 1290 nm, each
/// sampled at its center and +-5 nm. Components: bend, mode_converter,
/// beamsplitter, demultiplexer.
ScatteringSpec benchmark_spec(const std::string& component);

nlohmann::json to_json(const ScatteringSpec& spec);
ScatteringSpec spec_from_json(const nlohmann::json& j);

}  // namespace fabopt
