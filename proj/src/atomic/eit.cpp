#include <cmath>
#include <sstream>

#include "rydsat/atomic.hpp"
#include "rydsat/errors.hpp"
#include "rydsat/units.hpp"

namespace rydsat {

void DopplerModel::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw Error(ErrorKind::ValidationError, "doppler temperature must be > 0");
  if (!(probe_wavelength > 0.0) || !(coupling_wavelength > 0.0))
    throw Error(ErrorKind::ValidationError, "doppler wavelengths must be > 0");
  if (n_velocity < 11 || n_velocity % 2 == 0)
    throw Error(ErrorKind::ValidationError, "n_velocity must be odd and >= 11");
  if (atomic_mass < 0.0) throw Error(ErrorKind::ValidationError, "atomic_mass must be >= 0");
  if (!(span_sigmas > 0.0)) throw Error(ErrorKind::ValidationError, "span_sigmas must be > 0");
}

double DopplerModel::thermal_velocity() const {
  const double mass = atomic_mass > 0.0 ? atomic_mass : constants::cesium133_mass;
  return std::sqrt(constants::boltzmann * temperature / mass);
}

std::vector<VelocityClass> velocity_grid(const DopplerModel& model) {
  model.validate();
  const double sigma = model.thermal_velocity();
  const int n = model.n_velocity;
  const double vmax = model.span_sigmas * sigma;
  const double dv = 2.0 * vmax / (n - 1);

  std::vector<VelocityClass> grid(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = -vmax + i * dv;
    const double end_factor = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    const double w = end_factor * std::exp(-0.5 * (v / sigma) * (v / sigma));
    grid[i] = {v, w};
    total += w;
  }
  for (auto& c : grid) c.weight /= total;
  return grid;
}

LadderSystem doppler_shifted(const LadderSystem& sys, const DopplerModel& model, double velocity) {
  const double k_p = two_pi / model.probe_wavelength;
  const double k_c = two_pi / model.coupling_wavelength;
  LadderSystem s = sys;
  s.delta_p -= k_p * velocity;
  if (model.geometry == BeamGeometry::CounterPropagating)
    s.delta_c += k_c * velocity;
  else
    s.delta_c -= k_c * velocity;
  return s;
}

double mean_probe_absorption(const LadderSystem& sys, const std::optional<DopplerModel>& doppler) {
  if (!doppler) return probe_absorption(steady_state(sys));
  double acc = 0.0;
  for (const auto& cls : velocity_grid(*doppler))
    acc += cls.weight * probe_absorption(steady_state(doppler_shifted(sys, *doppler, cls.velocity)));
  return acc;
}

TransmissionScale TransmissionScale::for_system(const LadderSystem& sys,
                                                const std::optional<DopplerModel>& doppler) {
  LadderSystem two_level = sys;
  two_level.omega_c = 0.0;
  two_level.omega_mw = 0.0;
  LadderSystem field_free = sys;
  field_free.omega_mw = 0.0;
  field_free.delta_c = -sys.delta_p;

  TransmissionScale scale;
  scale.baseline_absorption = mean_probe_absorption(two_level, doppler);
  scale.peak_absorption = mean_probe_absorption(field_free, doppler);
  if (!(scale.baseline_absorption - scale.peak_absorption > 0.0)) {
    std::ostringstream os;
    os << "no field-free transparency: baseline absorption " << scale.baseline_absorption
       << " does not exceed two-photon-resonant absorption " << scale.peak_absorption;
    throw Error(ErrorKind::ValidationError, os.str());
  }
  return scale;
}

double probe_transmission(const LadderSystem& sys, const TransmissionScale& scale,
                          const std::optional<DopplerModel>& doppler) {
  return scale(mean_probe_absorption(sys, doppler));
}

Spectrum eit_spectrum(const LadderSystem& sys_template, std::pair<double, double> delta_c_range_hz,
                      int n_points, const std::optional<DopplerModel>& doppler) {
  sys_template.validate();
  const auto [start, stop] = delta_c_range_hz;
  if (n_points < 3) throw Error(ErrorKind::ValidationError, "n_points must be >= 3");
  if (!std::isfinite(start) || !std::isfinite(stop) || !(stop > start))
    throw Error(ErrorKind::ValidationError, "detuning range must be finite with stop > start");
  if (doppler) doppler->validate();

  const TransmissionScale scale = TransmissionScale::for_system(sys_template, doppler);
  Spectrum spec;
  spec.axis_kind = AxisKind::CouplingDetuning;
  spec.x.resize(n_points);
  spec.y.resize(n_points);
  const double step = (stop - start) / (n_points - 1);
  for (int i = 0; i < n_points; ++i) {
    const double x = (i == n_points - 1) ? stop : start + i * step;
    LadderSystem s = sys_template;
    s.delta_c = hz_to_rad_s(x);
    spec.x[i] = x;
    spec.y[i] = probe_transmission(s, scale, doppler);
  }
  return spec;
}

}  // namespace rydsat
