#pragma once

#include <optional>
#include <string>
#include <vector>

namespace rydsat {

struct BudgetTerm {
  std::string label;
  double db = 0.0;  // gain > 0, loss < 0

  bool operator==(const BudgetTerm&) const = default;
};

struct AntennaSpec {
  double diameter = 0.0;             // m
  double aperture_efficiency = 1.0;  // (0, 1]
  std::vector<BudgetTerm> fixed_losses;

  void validate() const;
  bool operator==(const AntennaSpec&) const = default;
};

struct CavitySpec {
  double q_factor = 1.0;
  std::string mode = "TE101";

  void validate() const;
  bool operator==(const CavitySpec&) const = default;
};

/// Power after each ledger term, for named checkpoints such as the
/// ground-level power after path loss.
struct BudgetCheckpoint {
  std::string label;
  double power_dbm = 0.0;
};

struct LinkBudget {
  double tx_power = 0.0;  // dBm
  std::vector<BudgetTerm> terms;
  double rx_power = 0.0;     // dBm
  double noise_floor = 0.0;  // dBm at the scenario RBW
  double predicted_snr = 0.0;
  std::vector<BudgetCheckpoint> checkpoints;

  /// Cumulative power right after the term with this label.
  std::optional<double> power_after(const std::string& label) const;

  /// Plain-text ledger, one line per term.
  std::string format() const;
};

/// Free-space loss (negative dB) with f in MHz and d in km:
/// L = -32.5 - 20 log10(f) - 20 log10(d).
double path_loss(double freq_mhz, double distance_km);

/// Parabolic aperture gain 10 log10(e_A (pi d / lambda)^2) in dB, before fixed losses.
double antenna_raw_gain(const AntennaSpec& spec, double wavelength_m);

/// Raw gain plus the antenna's fixed losses.
double antenna_gain(const AntennaSpec& spec, double wavelength_m);

/// Circulating power p_in + 10 log10(Q), dBm.
double cavity_circulated_power(double p_in_dbm, const CavitySpec& cavity);

LinkBudget compose_budget(double tx_power_dbm, const std::vector<BudgetTerm>& terms,
                          double noise_floor_dbm);

}  // namespace rydsat
