#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "rydsat/errors.hpp"
#include "rydsat/link_budget.hpp"

namespace rydsat {

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw Error(ErrorKind::NonpositiveInput, std::string(what) + " must be positive and finite");
}

}  // namespace

void AntennaSpec::validate() const {
  require_positive(diameter, "antenna diameter");
  if (!(aperture_efficiency > 0.0 && aperture_efficiency <= 1.0))
    throw Error(ErrorKind::ValidationError, "aperture efficiency must lie in (0, 1]");
  for (const auto& l : fixed_losses)
    if (!std::isfinite(l.db)) throw Error(ErrorKind::ValidationError, "non-finite loss " + l.label);
}

void CavitySpec::validate() const {
  if (!(q_factor >= 1.0) || !std::isfinite(q_factor))
    throw Error(ErrorKind::ValidationError, "cavity Q must be >= 1");
}

double path_loss(double freq_mhz, double distance_km) {
  require_positive(freq_mhz, "frequency");
  require_positive(distance_km, "distance");
  return -32.5 - 20.0 * std::log10(freq_mhz) - 20.0 * std::log10(distance_km);
}

double antenna_raw_gain(const AntennaSpec& spec, double wavelength_m) {
  spec.validate();
  require_positive(wavelength_m, "wavelength");
  const double ratio = std::numbers::pi * spec.diameter / wavelength_m;
  return 10.0 * std::log10(spec.aperture_efficiency * ratio * ratio);
}

double antenna_gain(const AntennaSpec& spec, double wavelength_m) {
  double g = antenna_raw_gain(spec, wavelength_m);
  for (const auto& l : spec.fixed_losses) g += l.db;
  return g;
}

double cavity_circulated_power(double p_in_dbm, const CavitySpec& cavity) {
  cavity.validate();
  return p_in_dbm + 10.0 * std::log10(cavity.q_factor);
}

LinkBudget compose_budget(double tx_power_dbm, const std::vector<BudgetTerm>& terms,
                          double noise_floor_dbm) {
  if (!std::isfinite(tx_power_dbm) || !std::isfinite(noise_floor_dbm))
    throw Error(ErrorKind::ValidationError, "tx power and noise floor must be finite");
  LinkBudget b;
  b.tx_power = tx_power_dbm;
  b.terms = terms;
  b.noise_floor = noise_floor_dbm;
  double p = tx_power_dbm;
  for (const auto& t : terms) {
    if (!std::isfinite(t.db))
      throw Error(ErrorKind::ValidationError, "budget term '" + t.label + "' is not finite");
    p += t.db;
    b.checkpoints.push_back({t.label, p});
  }
  b.rx_power = p;
  b.predicted_snr = b.rx_power - noise_floor_dbm;
  return b;
}

std::optional<double> LinkBudget::power_after(const std::string& label) const {
  for (const auto& c : checkpoints)
    if (c.label == label) return c.power_dbm;
  return std::nullopt;
}

std::string LinkBudget::format() const {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-28s %10s %12s\n", "term", "dB", "power [dBm]");
  os << line;
  std::snprintf(line, sizeof line, "%-28s %10s %12.2f\n", "tx power", "", tx_power);
  os << line;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    std::snprintf(line, sizeof line, "%-28s %+10.2f %12.2f\n", terms[i].label.c_str(), terms[i].db,
                  checkpoints[i].power_dbm);
    os << line;
  }
  std::snprintf(line, sizeof line, "%-28s %10s %12.2f\n", "noise floor", "", noise_floor);
  os << line;
  std::snprintf(line, sizeof line, "%-28s %10s %12.2f dB\n", "predicted SNR", "", predicted_snr);
  os << line;
  return os.str();
}

}  // namespace rydsat
