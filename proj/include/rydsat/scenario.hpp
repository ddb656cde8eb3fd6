#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rydsat/atomic.hpp"
#include "rydsat/heterodyne.hpp"
#include "rydsat/link_budget.hpp"

namespace rydsat {

// Boundary units: Hz, dBm, m, K, s. Frequencies become rad/s exactly once,
// when parse_scenario builds Scenario::ladder.

struct AtomicParams {
  double probe_detuning_hz = 0.0;
  double coupling_detuning_hz = 0.0;
  double mw_detuning_hz = 0.0;
  std::optional<double> probe_rabi_hz;     // required
  std::optional<double> coupling_rabi_hz;  // required
  std::optional<double> mw_rabi_hz;        // required
  double gamma_21_hz = 5.2e6;
  double gamma_32_hz = 1e3;
  double gamma_43_hz = 1e3;
  std::vector<double> dephasing_hz{0.0, 0.0, 0.0, 0.0};
  std::optional<double> dipole_moment_ea0;  // required
  double mw_resonance_hz = 3.778e9;
  bool doppler = false;
  double temperature_k = 300.0;
  double probe_wavelength_m = 852.357e-9;
  double coupling_wavelength_m = 509.236e-9;
  int n_velocity = 4001;
  BeamGeometry geometry = BeamGeometry::CounterPropagating;

  bool operator==(const AtomicParams&) const = default;
};

struct SweepParams {
  double start_hz = -30e6;
  double stop_hz = 30e6;
  int points = 601;

  bool operator==(const SweepParams&) const = default;
};

enum class TraceMode { Linearized, Direct };

struct HeterodyneParams {
  ToneKind kind = ToneKind::Beacon;
  double offset_hz = 2500.0;
  std::optional<double> amplitude_v_per_m;  // derived from the budget when absent
  double phase_rad = 0.0;
  double mod_rate_hz = 0.0;
  double bandwidth_hz = 0.0;
  double duty = 0.5;
  bool inverted = false;
  int harmonic_cap = 5;
  std::optional<double> e_loc_v_per_m;  // else k * sqrt(local_power)
  double local_power_dbm = -27.0;
  std::optional<double> noise_rms_v_per_m;  // else matched to the budget floor
  double sample_rate_hz = 10e3;
  double duration_s = 16.0;
  std::uint64_t seed = 1;
  double rbw_hz = 1.0;
  std::optional<double> signal_band_hz;  // half-width around the offset
  TraceMode mode = TraceMode::Linearized;

  bool operator==(const HeterodyneParams&) const = default;
};

struct BudgetParams {
  double tx_power_dbm = 47.0;
  double frequency_mhz = 3800.0;
  double distance_km = 36000.0;
  double antenna_diameter_m = 16.0;
  double aperture_efficiency = 0.7;
  std::optional<double> wavelength_m;  // else c / f
  std::vector<BudgetTerm> losses{{"cable", -3.0}, {"polarization", -3.0}};
  double lna_gain_db = 0.0;             // 0 omits the term
  double cavity_q = 0.0;                // 0 omits the term
  double noise_floor_dbm = -128.0;
  double rbw_hz = 1.0;
  std::optional<double> reported_snr_db;  // comparison value, never asserted

  bool operator==(const BudgetParams&) const = default;
};

struct CalibrationParams {
  double k = 169.27;  // V/m per sqrt(W)
  std::vector<double> powers_dbm{-16.0, -11.0, -6.0};
  std::string data_file;
  double max_linear_power_dbm = -25.0;

  bool operator==(const CalibrationParams&) const = default;
};

struct OutputParams {
  std::string csv;
  std::string summary;

  bool operator==(const OutputParams&) const = default;
};

struct Scenario {
  std::string name = "scenario";
  AtomicParams atomic;
  SweepParams sweep;
  HeterodyneParams heterodyne;
  BudgetParams budget;
  CalibrationParams calibration;
  OutputParams output;

  /// rad/s ladder built from `atomic` at parse time.
  LadderSystem ladder;

  bool operator==(const Scenario&) const = default;

  std::optional<DopplerModel> doppler() const;
  double dipole_moment_cm() const;
  double mw_wavelength_m() const;
};

/// Parses the sectioned key-value format. Throws ParseError (with line
/// number) for malformed lines, unknown sections/keys and bad values, and
/// ValidationError for missing required fields or violated invariants.
Scenario parse_scenario(std::string_view text);

/// Canonical text form; parse_scenario(to_text(s)) == s.
std::string to_text(const Scenario& s);

}  // namespace rydsat
