#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "rydsat/atomic.hpp"
#include "rydsat/spectrum.hpp"

namespace rydsat {

enum class ToneKind { Beacon, SquareModulated };

constexpr std::string_view to_string(ToneKind kind) {
  return kind == ToneKind::Beacon ? "beacon" : "square-modulated";
}

/// Signal field relative to the local oscillator:
/// E_sig(t) = amplitude * m(t) * cos(2 pi offset t + phase), with m(t) = 1 for a
/// beacon and an on/off square envelope at mod_rate otherwise.
struct ToneSpec {
  ToneKind kind = ToneKind::Beacon;
  double offset = 0.0;     // Hz, beat frequency against the local field
  double amplitude = 0.0;  // V/m
  double phase = 0.0;      // rad
  double mod_rate = 0.0;   // Hz, square-wave fundamental
  double bandwidth = 0.0;  // Hz, occupied bandwidth (metadata)
  double duty = 0.5;       // on fraction of each modulation period
  bool inverted = false;   // start the period in the off state
  int harmonic_cap = 5;    // highest modulation harmonic treated as signal content

  void validate() const;
  /// Highest frequency the tone is expected to occupy, Hz.
  double max_content_frequency() const;
  /// Square envelope value in {0, 1} (always 1 for a beacon).
  double envelope(double t) const;

  bool operator==(const ToneSpec&) const = default;
};

struct BasebandTrace {
  double sample_rate = 0.0;  // Hz
  std::vector<double> samples;
  double duration = 0.0;  // s
};

struct SnrMeasurement {
  double signal_power = 0.0;  // dB, fixed reference
  double noise_floor = 0.0;
  double snr = 0.0;
  double rbw = 0.0;
  double signal_frequency = 0.0;  // Hz, bin holding the maximum
};

/// Small-signal model of the atoms around the local-field operating point.
struct AtomicResponse {
  double e_loc = 0.0;         // V/m
  double transmission = 0.0;  // T at E_loc
  double slope = 0.0;         // dT/dE, per (V/m)
};

/// Atomic operating point: the ladder (omega_mw is set from the field), the
/// microwave transition dipole moment and the local field.
struct OperatingPoint {
  LadderSystem sys;
  double dipole_moment = 0.0;  // C m
  double e_loc = 0.0;          // V/m
  std::optional<DopplerModel> doppler;

  void validate() const;
  /// Steady-state transmission with the given total field.
  double transmission_at(double field, const TransmissionScale& scale) const;
  TransmissionScale transmission_scale() const;
};

/// Central finite difference of steady-state transmission versus field,
/// with step rel_step * e_loc.
AtomicResponse linear_response(const OperatingPoint& op, double rel_step = 1e-3);

/// Instantaneous E_loc + E_sig(t).
double total_field(double e_loc, const ToneSpec& tone, double t);

/// T(t) = T0 + g (E_tot(t) - E_loc) + g n(t), n white Gaussian with rms noise_rms.
/// Throws AliasingRejected if sample_rate <= 2 * max_content_frequency().
BasebandTrace synthesize_trace(const AtomicResponse& response, const ToneSpec& tone,
                               double sample_rate, double duration, double noise_rms,
                               std::uint64_t seed);

/// Validation path: integrates the master equation with the microwave Rabi
/// frequency following E_tot(t), starting from the steady state at E_loc.
/// Noise-free; meant for short traces (about 1 ms).
BasebandTrace synthesize_trace_direct(const OperatingPoint& op, const ToneSpec& tone,
                                      double sample_rate, double duration);

/// Welch estimate: Hann window, segment length round(sample_rate / rbw), 50%
/// overlap, per-segment mean removal. One-sided power scaled so a tone of
/// amplitude A on a bin centre reads A^2/2; y in dB relative to 1 unit^2.
/// Throws RbwTooFine when a single segment does not fit in the trace.
Spectrum power_spectrum(const BasebandTrace& trace, double rbw);

/// Equivalent noise bandwidth of the periodic Hann window, in bins.
inline constexpr double kHannEnbwBins = 1.5;

/// Sum of linear bin powers divided by the window ENBW: the trace variance.
double integrated_power(const Spectrum& spectrum);

/// Peak bin inside [band.first, band.second] against the median of all bins outside.
/// Throws EmptyBand if either set is empty.
SnrMeasurement measure_snr(const Spectrum& spec, std::pair<double, double> signal_band);

struct Sideband {
  double frequency = 0.0;     // Hz
  double relative_db = 0.0;   // vs. the first-order sideband
  int order = 0;              // signed harmonic index n
};

/// Predicted sidebands offset +- n mod_rate for n <= harmonic_cap with nonzero
/// Fourier weight, ascending in frequency. For 50% duty these are the odd n at -20 log10(n).
/// Throws WrongKind for a beacon.
std::vector<Sideband> square_mod_sidebands(const ToneSpec& tone);

/// White-noise rms (field units) whose Welch floor at `rbw` equals the power
/// of a tone of amplitude e_floor.
double noise_rms_for_floor(double e_floor, double rbw, double sample_rate);

}  // namespace rydsat
