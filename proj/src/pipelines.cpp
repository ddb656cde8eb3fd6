#include <algorithm>
#include <cmath>

#include "rydsat/errors.hpp"
#include "rydsat/pipelines.hpp"
#include "rydsat/units.hpp"

namespace rydsat {

LinkBudget scenario_budget(const Scenario& s) {
  const auto& b = s.budget;
  AntennaSpec antenna;
  antenna.diameter = b.antenna_diameter_m;
  antenna.aperture_efficiency = b.aperture_efficiency;
  antenna.fixed_losses = b.losses;

  std::vector<BudgetTerm> terms;
  terms.push_back({kPathLossLabel, path_loss(b.frequency_mhz, b.distance_km)});
  terms.push_back({kAntennaLabel, antenna_raw_gain(antenna, s.mw_wavelength_m())});
  for (const auto& l : b.losses) terms.push_back(l);
  if (b.lna_gain_db != 0.0) terms.push_back({kLnaLabel, b.lna_gain_db});
  if (b.cavity_q > 0.0) {
    CavitySpec cavity;
    cavity.q_factor = b.cavity_q;
    terms.push_back({kCavityLabel, cavity_circulated_power(0.0, cavity)});
  }
  return compose_budget(b.tx_power_dbm, terms, b.noise_floor_dbm);
}

double ground_level_power(const LinkBudget& b) { return b.power_after(kPathLossLabel).value_or(b.tx_power); }

double local_field(const Scenario& s) {
  if (s.heterodyne.e_loc_v_per_m) return *s.heterodyne.e_loc_v_per_m;
  return s.calibration.k * std::sqrt(dbm_to_watts(s.heterodyne.local_power_dbm));
}

OperatingPoint operating_point(const Scenario& s) {
  OperatingPoint op;
  op.sys = s.ladder;
  op.dipole_moment = s.dipole_moment_cm();
  op.e_loc = local_field(s);
  op.doppler = s.doppler();
  return op;
}

ToneSpec scenario_tone(const Scenario& s, const LinkBudget& budget) {
  const auto& h = s.heterodyne;
  ToneSpec tone;
  tone.kind = h.kind;
  tone.offset = h.offset_hz;
  tone.amplitude = h.amplitude_v_per_m.value_or(s.calibration.k *
                                                std::sqrt(dbm_to_watts(budget.rx_power)));
  tone.phase = h.phase_rad;
  tone.mod_rate = h.mod_rate_hz;
  tone.bandwidth = h.bandwidth_hz;
  tone.duty = h.duty;
  tone.inverted = h.inverted;
  tone.harmonic_cap = h.harmonic_cap;
  return tone;
}

double scenario_noise_rms(const Scenario& s, const LinkBudget& budget) {
  if (s.heterodyne.noise_rms_v_per_m) return *s.heterodyne.noise_rms_v_per_m;
  const double e_floor = s.calibration.k * std::sqrt(dbm_to_watts(budget.noise_floor));
  return noise_rms_for_floor(e_floor, s.budget.rbw_hz, s.heterodyne.sample_rate_hz);
}

HeterodyneRun run_heterodyne(const Scenario& s, std::optional<double> noise_override) {
  const LinkBudget budget = scenario_budget(s);
  HeterodyneRun run;
  run.op = operating_point(s);
  run.tone = scenario_tone(s, budget);
  run.noise_rms = noise_override.value_or(scenario_noise_rms(s, budget));
  const auto& h = s.heterodyne;

  if (h.mode == TraceMode::Direct) {
    run.response = linear_response(run.op);
    run.trace = synthesize_trace_direct(run.op, run.tone, h.sample_rate_hz, h.duration_s);
  } else {
    run.response = linear_response(run.op);
    run.trace = synthesize_trace(run.response, run.tone, h.sample_rate_hz, h.duration_s,
                                 run.noise_rms, h.seed);
  }
  run.spectrum = power_spectrum(run.trace, h.rbw_hz);

  double half = 0.0;
  if (h.signal_band_hz)
    half = *h.signal_band_hz;
  else if (h.kind == ToneKind::SquareModulated)
    half = h.bandwidth_hz > 0.0 ? 0.5 * h.bandwidth_hz : h.mod_rate_hz;
  else
    half = 3.0 * run.spectrum.rbw;
  run.signal_band = {h.offset_hz - half, h.offset_hz + half};
  run.snr = measure_snr(run.spectrum, run.signal_band);
  return run;
}

std::vector<SidebandCheck> measure_sidebands(const Spectrum& spec, const ToneSpec& tone) {
  const auto predicted = square_mod_sidebands(tone);
  const double bin = spec.x.size() > 1 ? spec.x[1] - spec.x[0] : 0.0;
  const auto level_near = [&](double f) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < spec.x.size(); ++i)
      if (std::abs(spec.x[i] - f) <= 1.01 * bin) best = std::max(best, spec.y[i]);
    if (!std::isfinite(best))
      throw Error(ErrorKind::EmptyBand, "sideband outside spectrum range");
    return best;
  };

  std::vector<SidebandCheck> out;
  double first_lower = 0.0, first_upper = 0.0;
  for (const auto& p : predicted) {
    if (p.order == -1) first_lower = level_near(p.frequency);
    if (p.order == 1) first_upper = level_near(p.frequency);
  }
  for (const auto& p : predicted) {
    SidebandCheck c;
    c.predicted = p;
    c.measured_db = level_near(p.frequency);
    c.measured_rel_db = c.measured_db - (p.order < 0 ? first_lower : first_upper);
    c.error_db = c.measured_rel_db - p.relative_db;
    out.push_back(c);
  }
  return out;
}

Spectrum scenario_eit_spectrum(const Scenario& s) {
  return eit_spectrum(s.ladder, {s.sweep.start_hz, s.sweep.stop_hz}, s.sweep.points, s.doppler());
}

namespace {

AtInference infer_from_spectrum(const Scenario& s, Spectrum spectrum) {
  AtInference r;
  r.spectrum = std::move(spectrum);
  std::tie(r.lower, r.upper) = splitting_peaks(r.spectrum);
  r.splitting_hz = r.upper.position - r.lower.position;
  const double mu = s.dipole_moment_cm();
  r.field_v_per_m = field_from_splitting(r.splitting_hz, mu);
  const double detuning = std::abs(s.atomic.mw_detuning_hz);
  const double resonant_split =
      r.splitting_hz > detuning ? std::sqrt(r.splitting_hz * r.splitting_hz - detuning * detuning) : 0.0;
  r.corrected_field_v_per_m =
      resonant_split > 0.0 ? field_from_splitting(resonant_split, mu) : 0.0;
  r.configured_field_v_per_m =
      *s.atomic.mw_rabi_hz > 0.0 ? field_from_splitting(*s.atomic.mw_rabi_hz, mu) : 0.0;
  return r;
}

}  // namespace

AtInference run_at_inference(const Scenario& s) { return infer_from_spectrum(s, scenario_eit_spectrum(s)); }

CalibrationRun calibrate_points(const Scenario& s, const std::vector<CalibrationPoint>& points) {
  CalibrationRun run;
  run.points = points;
  run.calibration = fit_calibration(points);
  const double e_min = run.calibration.field_at(dbm_to_watts(s.budget.noise_floor_dbm));
  run.sensitivity = sensitivity_report(e_min, s.budget.rbw_hz, s.budget.noise_floor_dbm,
                                       s.calibration.max_linear_power_dbm);
  return run;
}

CalibrationRun run_calibration(const Scenario& s) {
  if (s.calibration.powers_dbm.size() < 2)
    throw Error(ErrorKind::InsufficientData, "calibration.powers_dbm needs at least 2 entries");
  const double mu = s.dipole_moment_cm();
  std::vector<CalibrationPoint> points;
  for (double dbm : s.calibration.powers_dbm) {
    const double p = dbm_to_watts(dbm);
    Scenario trial = s;
    trial.ladder.omega_mw = rabi_from_field(s.calibration.k * std::sqrt(p), mu);
    trial.atomic.mw_rabi_hz = rad_s_to_hz(trial.ladder.omega_mw);
    const AtInference at = run_at_inference(trial);
    points.push_back({p, at.corrected_field_v_per_m});
  }
  return calibrate_points(s, points);
}

}  // namespace rydsat
