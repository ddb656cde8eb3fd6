#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "rydsat/field_inference.hpp"
#include "rydsat/heterodyne.hpp"
#include "rydsat/link_budget.hpp"
#include "rydsat/scenario.hpp"

namespace rydsat {

// Ledger labels used by scenario_budget.
inline constexpr const char* kPathLossLabel = "free-space path loss";
inline constexpr const char* kAntennaLabel = "antenna aperture gain";
inline constexpr const char* kLnaLabel = "lna";
inline constexpr const char* kCavityLabel = "cavity";

/// Path loss, antenna aperture gain, the antenna's fixed losses, then the
/// optional LNA and cavity terms.
LinkBudget scenario_budget(const Scenario& s);

/// Ground-level power: the checkpoint right after the path-loss term.
double ground_level_power(const LinkBudget& b);

/// Local field: explicit e_loc, or k sqrt(local power).
double local_field(const Scenario& s);
OperatingPoint operating_point(const Scenario& s);

struct HeterodyneRun {
  OperatingPoint op;
  AtomicResponse response;
  ToneSpec tone;
  double noise_rms = 0.0;  // V/m
  BasebandTrace trace;
  Spectrum spectrum;
  std::pair<double, double> signal_band;
  SnrMeasurement snr;
};

ToneSpec scenario_tone(const Scenario& s, const LinkBudget& budget);
double scenario_noise_rms(const Scenario& s, const LinkBudget& budget);

/// Tone amplitude and noise default to the budget's received power and floor
/// mapped through E = k sqrt(P). `noise_override` replaces the noise rms.
HeterodyneRun run_heterodyne(const Scenario& s, std::optional<double> noise_override = std::nullopt);

struct SidebandCheck {
  Sideband predicted;
  double measured_db = 0.0;      // absolute bin level
  double measured_rel_db = 0.0;  // vs. the same-side first-order sideband
  double error_db = 0.0;         // measured_rel_db - predicted.relative_db
};

/// Largest bin within one bin of each predicted sideband.
std::vector<SidebandCheck> measure_sidebands(const Spectrum& spec, const ToneSpec& tone);

struct AtInference {
  Spectrum spectrum;
  Peak lower;
  Peak upper;
  double splitting_hz = 0.0;
  double field_v_per_m = 0.0;           // 2 pi hbar delta_f / mu
  double corrected_field_v_per_m = 0.0; // removes the microwave detuning: sqrt(df^2 - dmw^2)
  double configured_field_v_per_m = 0.0;
};

Spectrum scenario_eit_spectrum(const Scenario& s);
AtInference run_at_inference(const Scenario& s);

struct CalibrationRun {
  std::vector<CalibrationPoint> points;
  FieldCalibration calibration;
  SensitivityReport sensitivity;
};

/// Simulates an AT measurement at each configured power (true field k sqrt(P),
/// resonant inversion) and fits E = k sqrt(P) to the inferred fields.
CalibrationRun run_calibration(const Scenario& s);

/// Fits user-supplied points; sensitivity uses the scenario floor.
CalibrationRun calibrate_points(const Scenario& s, const std::vector<CalibrationPoint>& points);

}  // namespace rydsat
