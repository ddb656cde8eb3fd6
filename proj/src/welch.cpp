#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include <fftw3.h>

#include "rydsat/errors.hpp"
#include "rydsat/heterodyne.hpp"

namespace rydsat {

namespace {

struct FftwDeleter {
  void operator()(double* p) const { fftw_free(p); }
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};

// Smallest positive value reported, so silent bins stay finite in dB.
constexpr double kPowerFloor = 1e-300;

}  // namespace

Spectrum power_spectrum(const BasebandTrace& trace, double rbw) {
  if (!(rbw > 0.0) || !(trace.sample_rate > 0.0))
    throw Error(ErrorKind::ValidationError, "rbw and sample rate must be positive");
  const std::size_t total = trace.samples.size();
  const double duration = static_cast<double>(total) / trace.sample_rate;
  const auto seg = static_cast<std::size_t>(std::llround(trace.sample_rate / rbw));
  if (rbw * duration < 1.0 - 1e-12 || seg > total || seg < 2) {
    std::ostringstream os;
    os << "rbw " << rbw << " Hz needs " << seg << " samples per segment; trace has " << total;
    throw Error(ErrorKind::RbwTooFine, os.str());
  }

  const std::size_t hop = std::max<std::size_t>(seg / 2, 1);
  const std::size_t n_bins = seg / 2 + 1;

  std::vector<double> window(seg);
  double window_sum = 0.0;
  for (std::size_t i = 0; i < seg; ++i) {
    window[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / seg));
    window_sum += window[i];
  }

  std::unique_ptr<double, FftwDeleter> in(fftw_alloc_real(seg));
  std::unique_ptr<fftw_complex, FftwDeleter> out(fftw_alloc_complex(n_bins));
  std::unique_ptr<fftw_plan_s, PlanDeleter> plan(
      fftw_plan_dft_r2c_1d(static_cast<int>(seg), in.get(), out.get(), FFTW_ESTIMATE));

  std::vector<double> acc(n_bins, 0.0);
  std::size_t n_segments = 0;
  for (std::size_t start = 0; start + seg <= total; start += hop) {
    double mean = 0.0;
    for (std::size_t i = 0; i < seg; ++i) mean += trace.samples[start + i];
    mean /= static_cast<double>(seg);
    for (std::size_t i = 0; i < seg; ++i) in.get()[i] = (trace.samples[start + i] - mean) * window[i];
    fftw_execute(plan.get());
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double re = out.get()[k][0], im = out.get()[k][1];
      acc[k] += re * re + im * im;
    }
    ++n_segments;
  }

  const double norm = 1.0 / (window_sum * window_sum * static_cast<double>(n_segments));
  Spectrum spec;
  spec.axis_kind = AxisKind::BasebandFrequency;
  spec.rbw = trace.sample_rate / static_cast<double>(seg);
  spec.x.resize(n_bins);
  spec.y.resize(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    const bool edge = (k == 0) || (seg % 2 == 0 && k == n_bins - 1);
    const double p = acc[k] * norm * (edge ? 1.0 : 2.0);
    spec.x[k] = static_cast<double>(k) * spec.rbw;
    spec.y[k] = 10.0 * std::log10(std::max(p, kPowerFloor));
  }
  return spec;
}

double integrated_power(const Spectrum& spectrum) {
  double sum = 0.0;
  for (double db : spectrum.y) sum += std::pow(10.0, db / 10.0);
  return sum / kHannEnbwBins;
}

}  // namespace rydsat
