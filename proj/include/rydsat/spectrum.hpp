#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace rydsat {

enum class AxisKind { CouplingDetuning, BasebandFrequency };

constexpr std::string_view to_string(AxisKind kind) {
  return kind == AxisKind::CouplingDetuning ? "coupling-detuning" : "baseband-frequency";
}

/// Sampled curve. x is always in Hz. y is normalized probe transmission for
/// coupling-detuning sweeps and power in dB (fixed reference) for baseband spectra.
struct Spectrum {
  AxisKind axis_kind = AxisKind::CouplingDetuning;
  std::vector<double> x;
  std::vector<double> y;
  double rbw = 0.0;  // Hz, baseband spectra only

  std::string_view y_unit() const {
    return axis_kind == AxisKind::CouplingDetuning ? "transmission" : "dB";
  }

  /// Throws ValidationError unless x is strictly increasing and sizes match.
  void validate() const;
};

struct Peak {
  std::size_t index = 0;
  double position = 0.0;  // quadratic-refined x
  double height = 0.0;    // quadratic-refined y
  double prominence = 0.0;
};

/// Local maxima of y with prominence at least `min_prominence`, sorted by x.
/// Plateaus report their lowest-x sample. Positions are refined by fitting a
/// parabola through the three samples around each maximum.
std::vector<Peak> find_peaks(const Spectrum& spec, double min_prominence);

}  // namespace rydsat
