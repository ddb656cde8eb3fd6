#include <algorithm>
#include <cmath>
#include <sstream>

#include "rydsat/errors.hpp"
#include "rydsat/field_inference.hpp"
#include "rydsat/units.hpp"

namespace rydsat {

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << what << " must be positive and finite (got " << value << ")";
    throw Error(ErrorKind::NonpositiveInput, os.str());
  }
}

}  // namespace

double FieldCalibration::field_at(double power_w) const { return k * std::sqrt(power_w); }

double field_from_splitting(double delta_f_hz, double dipole_moment_cm) {
  require_positive(delta_f_hz, "splitting");
  require_positive(dipole_moment_cm, "dipole moment");
  return two_pi * constants::hbar * delta_f_hz / dipole_moment_cm;
}

double splitting_from_field(double field_v_per_m, double dipole_moment_cm) {
  require_positive(dipole_moment_cm, "dipole moment");
  if (field_v_per_m < 0.0) throw Error(ErrorKind::NonpositiveInput, "field must be >= 0");
  return dipole_moment_cm * field_v_per_m / (two_pi * constants::hbar);
}

double rabi_from_field(double field_v_per_m, double dipole_moment_cm) {
  return two_pi * splitting_from_field(field_v_per_m, dipole_moment_cm);
}

std::pair<Peak, Peak> splitting_peaks(const Spectrum& spec, const SplittingOptions& opts) {
  spec.validate();
  if (spec.y.empty()) throw Error(ErrorKind::NoSplitting, "empty spectrum");
  const auto [lo, hi] = std::minmax_element(spec.y.begin(), spec.y.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) throw Error(ErrorKind::NoSplitting, "flat spectrum");

  std::vector<Peak> peaks = find_peaks(spec, opts.relative_prominence * range);
  if (peaks.size() < 2) {
    throw Error(ErrorKind::NoSplitting, "found " + std::to_string(peaks.size()) +
                                            " qualifying peak(s); need 2");
  }
  // Most prominent first; equal prominence keeps the lower detuning.
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const Peak& a, const Peak& b) { return a.prominence > b.prominence; });
  Peak a = peaks[0], b = peaks[1];
  if (b.position < a.position) std::swap(a, b);
  return {a, b};
}

double splitting_from_spectrum(const Spectrum& spec, const SplittingOptions& opts) {
  const auto [a, b] = splitting_peaks(spec, opts);
  return b.position - a.position;
}

FieldCalibration fit_calibration(const std::vector<CalibrationPoint>& points) {
  if (points.size() < 2)
    throw Error(ErrorKind::InsufficientData, "need at least 2 calibration points");
  double sxy = 0.0, sxx = 0.0, mean_e = 0.0;
  for (const auto& p : points) {
    require_positive(p.power_w, "calibration power");
    require_positive(p.field_v_per_m, "calibration field");
    const double s = std::sqrt(p.power_w);
    sxy += s * p.field_v_per_m;
    sxx += p.power_w;
    mean_e += p.field_v_per_m;
  }
  mean_e /= static_cast<double>(points.size());

  FieldCalibration cal;
  cal.k = sxy / sxx;
  cal.n_points = static_cast<int>(points.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& p : points) {
    const double r = p.field_v_per_m - cal.k * std::sqrt(p.power_w);
    cal.residuals.push_back(r);
    ss_res += r * r;
    ss_tot += (p.field_v_per_m - mean_e) * (p.field_v_per_m - mean_e);
  }
  // Centered R^2; all-equal fields (ss_tot = 0) fit perfectly only if ss_res = 0.
  if (ss_tot > 0.0)
    cal.fit_r2 = std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
  else
    cal.fit_r2 = ss_res == 0.0 ? 1.0 : 0.0;
  return cal;
}

SensitivityReport sensitivity_report(double e_min, double rbw, double noise_floor_dbm,
                                     double max_linear_power_dbm) {
  require_positive(e_min, "e_min");
  require_positive(rbw, "rbw");
  if (!std::isfinite(noise_floor_dbm) || !std::isfinite(max_linear_power_dbm) ||
      !(max_linear_power_dbm > noise_floor_dbm)) {
    throw Error(ErrorKind::NonpositiveInput, "max_linear_power must exceed noise_floor");
  }
  SensitivityReport r;
  r.e_min = e_min;
  r.rbw = rbw;
  r.sensitivity = e_min / std::sqrt(rbw);
  r.min_detectable_power = noise_floor_dbm;
  r.dynamic_range = max_linear_power_dbm - noise_floor_dbm;
  return r;
}

}  // namespace rydsat
