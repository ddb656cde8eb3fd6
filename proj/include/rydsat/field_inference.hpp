#pragma once

#include <utility>
#include <vector>

#include "rydsat/spectrum.hpp"

namespace rydsat {

/// E = k * sqrt(P) calibration between incident microwave power and the
/// field seen by the atoms.
struct FieldCalibration {
  double k = 0.0;       // V/m per sqrt(W)
  double fit_r2 = 0.0;  // in [0, 1]
  int n_points = 0;
  std::vector<double> residuals;  // V/m, E_measured - k sqrt(P)

  double field_at(double power_w) const;
};

struct SensitivityReport {
  double e_min = 0.0;                 // V/m
  double rbw = 0.0;                   // Hz
  double sensitivity = 0.0;           // V/m/sqrt(Hz)
  double min_detectable_power = 0.0;  // dBm
  double dynamic_range = 0.0;         // dB
};

struct CalibrationPoint {
  double power_w;
  double field_v_per_m;
};

/// Autler-Townes inversion E = 2 pi hbar delta_f / mu (magnitude).
double field_from_splitting(double delta_f_hz, double dipole_moment_cm);

/// Inverse of field_from_splitting: AT splitting in Hz for field E.
double splitting_from_field(double field_v_per_m, double dipole_moment_cm);

/// Microwave Rabi frequency mu E / hbar in rad/s.
double rabi_from_field(double field_v_per_m, double dipole_moment_cm);

struct SplittingOptions {
  /// Minimum peak prominence as a fraction of the spectrum's y range.
  double relative_prominence = 0.02;
};

/// Distance between the two most prominent peaks (quadratic-refined), Hz.
/// Throws NoSplitting when fewer than two peaks qualify.
double splitting_from_spectrum(const Spectrum& spec, const SplittingOptions& opts = {});

/// The two most prominent peaks, ordered by position.
std::pair<Peak, Peak> splitting_peaks(const Spectrum& spec, const SplittingOptions& opts = {});

/// Least-squares fit of E against sqrt(P) through the origin.
FieldCalibration fit_calibration(const std::vector<CalibrationPoint>& points);

SensitivityReport sensitivity_report(double e_min, double rbw, double noise_floor_dbm,
                                     double max_linear_power_dbm);

}  // namespace rydsat
