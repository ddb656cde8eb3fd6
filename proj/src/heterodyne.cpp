#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "rydsat/errors.hpp"
#include "rydsat/field_inference.hpp"
#include "rydsat/heterodyne.hpp"
#include "rydsat/units.hpp"

namespace rydsat {

void ToneSpec::validate() const {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
    throw Error(ErrorKind::ValidationError, "tone amplitude must be >= 0");
  if (!(offset >= 0.0) || !std::isfinite(offset))
    throw Error(ErrorKind::ValidationError, "tone offset must be >= 0");
  if (!std::isfinite(phase)) throw Error(ErrorKind::ValidationError, "tone phase must be finite");
  if (kind == ToneKind::SquareModulated) {
    if (!(mod_rate > 0.0) || !std::isfinite(mod_rate))
      throw Error(ErrorKind::ValidationError, "mod_rate must be > 0 for a square-modulated tone");
    if (!(duty > 0.0 && duty < 1.0))
      throw Error(ErrorKind::ValidationError, "duty must lie in (0, 1)");
    if (harmonic_cap < 1) throw Error(ErrorKind::ValidationError, "harmonic_cap must be >= 1");
  }
  if (!(bandwidth >= 0.0)) throw Error(ErrorKind::ValidationError, "bandwidth must be >= 0");
}

double ToneSpec::max_content_frequency() const {
  if (kind == ToneKind::Beacon) return offset;
  return offset + harmonic_cap * mod_rate;
}

double ToneSpec::envelope(double t) const {
  if (kind == ToneKind::Beacon) return 1.0;
  double cycles = t * mod_rate;
  double frac = cycles - std::floor(cycles);
  const bool on = frac < duty;
  return (on != inverted) ? 1.0 : 0.0;
}

double total_field(double e_loc, const ToneSpec& tone, double t) {
  if (!(e_loc > 0.0)) throw Error(ErrorKind::NonpositiveInput, "e_loc must be positive");
  return e_loc + tone.amplitude * tone.envelope(t) * std::cos(two_pi * tone.offset * t + tone.phase);
}

// ---------------------------------------------------------------------------

void OperatingPoint::validate() const {
  sys.validate();
  if (!(dipole_moment > 0.0)) throw Error(ErrorKind::ValidationError, "dipole moment must be > 0");
  if (!(e_loc > 0.0)) throw Error(ErrorKind::ValidationError, "e_loc must be > 0");
  if (doppler) doppler->validate();
}

TransmissionScale OperatingPoint::transmission_scale() const {
  return TransmissionScale::for_system(sys, doppler);
}

double OperatingPoint::transmission_at(double field, const TransmissionScale& scale) const {
  LadderSystem s = sys;
  s.omega_mw = rabi_from_field(std::abs(field), dipole_moment);
  return probe_transmission(s, scale, doppler);
}

AtomicResponse linear_response(const OperatingPoint& op, double rel_step) {
  op.validate();
  if (!(rel_step > 0.0 && rel_step < 1.0))
    throw Error(ErrorKind::ValidationError, "rel_step must lie in (0, 1)");
  const TransmissionScale scale = op.transmission_scale();
  const double h = rel_step * op.e_loc;
  AtomicResponse r;
  r.e_loc = op.e_loc;
  r.transmission = op.transmission_at(op.e_loc, scale);
  r.slope = (op.transmission_at(op.e_loc + h, scale) - op.transmission_at(op.e_loc - h, scale)) /
            (2.0 * h);
  return r;
}

namespace {

void check_trace_request(const ToneSpec& tone, double sample_rate, double duration) {
  tone.validate();
  if (!(sample_rate > 0.0) || !(duration > 0.0))
    throw Error(ErrorKind::ValidationError, "sample_rate and duration must be > 0");
  const double content = tone.max_content_frequency();
  if (!(sample_rate > 2.0 * content)) {
    std::ostringstream os;
    os << "sample rate " << sample_rate << " Hz does not exceed twice the signal content "
       << content << " Hz";
    throw Error(ErrorKind::AliasingRejected, os.str());
  }
  if (duration * tone.offset < 10.0) {
    throw Error(ErrorKind::ValidationError,
                "trace must span at least 10 beat periods (duration * offset >= 10)");
  }
}

std::size_t sample_count(double sample_rate, double duration) {
  return static_cast<std::size_t>(std::llround(sample_rate * duration));
}

}  // namespace

BasebandTrace synthesize_trace(const AtomicResponse& response, const ToneSpec& tone,
                               double sample_rate, double duration, double noise_rms,
                               std::uint64_t seed) {
  check_trace_request(tone, sample_rate, duration);
  if (!(response.e_loc > 0.0)) throw Error(ErrorKind::NonpositiveInput, "e_loc must be positive");
  if (!(noise_rms >= 0.0)) throw Error(ErrorKind::ValidationError, "noise_rms must be >= 0");

  BasebandTrace trace;
  trace.sample_rate = sample_rate;
  trace.duration = duration;
  const std::size_t n = sample_count(sample_rate, duration);
  trace.samples.resize(n);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const double de = total_field(response.e_loc, tone, t) - response.e_loc;
    const double noise = noise_rms > 0.0 ? noise_rms * gauss(rng) : 0.0;
    trace.samples[i] = response.transmission + response.slope * (de + noise);
  }
  return trace;
}

BasebandTrace synthesize_trace_direct(const OperatingPoint& op, const ToneSpec& tone,
                                      double sample_rate, double duration) {
  op.validate();
  check_trace_request(tone, sample_rate, duration);
  if (op.doppler)
    throw Error(ErrorKind::ValidationError, "direct integration does not support Doppler averaging");

  const TransmissionScale scale = op.transmission_scale();
  LadderSystem start = op.sys;
  start.omega_mw = rabi_from_field(op.e_loc, op.dipole_moment);
  const DensityMatrix rho0 = steady_state(start);

  BasebandTrace trace;
  trace.sample_rate = sample_rate;
  trace.duration = duration;
  const std::size_t n = sample_count(sample_rate, duration);
  std::vector<double> times(n);
  for (std::size_t i = 0; i < n; ++i) times[i] = static_cast<double>(i) / sample_rate;
  trace.samples.reserve(n);

  const auto omega_at = [&](double t) {
    return rabi_from_field(std::abs(total_field(op.e_loc, tone, t)), op.dipole_moment);
  };
  evolve_driven(
      op.sys, rho0, omega_at, times, 1.0 / sample_rate,
      [&](double, const Matrix4c& rho) { trace.samples.push_back(scale(rho(0, 1).imag())); });
  return trace;
}

// ---------------------------------------------------------------------------

SnrMeasurement measure_snr(const Spectrum& spec, std::pair<double, double> signal_band) {
  spec.validate();
  const auto [lo, hi] = signal_band;
  double best = -std::numeric_limits<double>::infinity();
  double best_x = 0.0;
  std::vector<double> outside;
  outside.reserve(spec.y.size());
  bool any_inside = false;
  for (std::size_t i = 0; i < spec.x.size(); ++i) {
    if (spec.x[i] >= lo && spec.x[i] <= hi) {
      any_inside = true;
      if (spec.y[i] > best) {
        best = spec.y[i];
        best_x = spec.x[i];
      }
    } else {
      outside.push_back(spec.y[i]);
    }
  }
  if (!any_inside) throw Error(ErrorKind::EmptyBand, "no spectrum bins inside the signal band");
  if (outside.empty()) throw Error(ErrorKind::EmptyBand, "no spectrum bins outside the signal band");

  const std::size_t mid = outside.size() / 2;
  std::nth_element(outside.begin(), outside.begin() + mid, outside.end());
  double median = outside[mid];
  if (outside.size() % 2 == 0) {
    const double lower = *std::max_element(outside.begin(), outside.begin() + mid);
    median = 0.5 * (median + lower);
  }
  SnrMeasurement m;
  m.signal_power = best;
  m.noise_floor = median;
  m.snr = best - median;
  m.rbw = spec.rbw;
  m.signal_frequency = best_x;
  return m;
}

std::vector<Sideband> square_mod_sidebands(const ToneSpec& tone) {
  if (tone.kind != ToneKind::SquareModulated)
    throw Error(ErrorKind::WrongKind, "sidebands are defined for square-modulated tones only");
  tone.validate();
  // Harmonic n of a duty-D pulse train has weight |sin(n pi D)| / n.
  const double first = std::abs(std::sin(std::numbers::pi * tone.duty));
  std::vector<Sideband> out;
  for (int n = 1; n <= tone.harmonic_cap; ++n) {
    const double w = std::abs(std::sin(n * std::numbers::pi * tone.duty)) / n;
    if (w < 1e-9 * first) continue;
    const double rel = 20.0 * std::log10(w / first);
    out.push_back({tone.offset - n * tone.mod_rate, rel, -n});
    out.push_back({tone.offset + n * tone.mod_rate, rel, n});
  }
  std::sort(out.begin(), out.end(),
            [](const Sideband& a, const Sideband& b) { return a.frequency < b.frequency; });
  return out;
}

double noise_rms_for_floor(double e_floor, double rbw, double sample_rate) {
  if (!(e_floor >= 0.0) || !(rbw > 0.0) || !(sample_rate > 0.0))
    throw Error(ErrorKind::NonpositiveInput, "noise floor inputs must be positive");
  // Welch floor per bin = (2 sigma^2 / fs) * ENBW * rbw; match e_floor^2 / 2.
  return e_floor * std::sqrt(sample_rate / (4.0 * kHannEnbwBins * rbw));
}

}  // namespace rydsat
