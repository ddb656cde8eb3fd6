#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rydsat/cli.hpp"
#include "rydsat/pipelines.hpp"
#include "rydsat/units.hpp"

namespace rydsat {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

int exit_code_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Validation: return kExitValidation;
    case ErrorCategory::Solver: return kExitSolver;
    case ErrorCategory::Dsp: return kExitDsp;
    case ErrorCategory::Io: return kExitIo;
  }
  return kExitValidation;
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

std::string csv_header(std::string_view axis, std::string_view unit, double rbw) {
  std::string h = "# axis=";
  h += axis;
  h += " unit=";
  h += unit;
  h += " rbw=" + format_number(rbw) + "\n";
  return h;
}

}  // namespace

std::string spectrum_csv(const Spectrum& spec) {
  std::string s = csv_header(to_string(spec.axis_kind), spec.y_unit(), spec.rbw);
  for (std::size_t i = 0; i < spec.x.size(); ++i)
    s += format_number(spec.x[i]) + "," + format_number(spec.y[i]) + "\n";
  return s;
}

namespace {

// Non-finite values have no JSON spelling; they become null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

std::vector<CalibrationPoint> read_calibration_data(const fs::path& path) {
  const std::string text = read_file(path);
  std::vector<CalibrationPoint> points;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto comma = line.find(',');
    double v[2];
    bool ok = comma != std::string::npos;
    for (int c = 0; ok && c < 2; ++c) {
      std::string_view cell = c == 0 ? std::string_view(line).substr(0, comma)
                                     : std::string_view(line).substr(comma + 1);
      while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
      while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
      const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v[c]);
      ok = r.ec == std::errc() && r.ptr == cell.data() + cell.size();
    }
    if (!ok)
      throw Error(ErrorKind::ParseError,
                  path.string() + ":" + std::to_string(line_no) + ": expected power_dbm,field_v_per_m");
    points.push_back({dbm_to_watts(v[0]), v[1]});
  }
  return points;
}

Json peak_json(const Peak& p) {
  return Json{{"position_hz", num(p.position)}, {"height", num(p.height)}, {"prominence", num(p.prominence)}};
}

Json budget_json(const LinkBudget& b) {
  Json terms = Json::array();
  for (std::size_t i = 0; i < b.terms.size(); ++i)
    terms.push_back({{"label", b.terms[i].label},
                     {"gain_db", num(b.terms[i].db)},
                     {"power_dbm", num(b.checkpoints[i].power_dbm)}});
  return Json{{"tx_power_dbm", num(b.tx_power)},
              {"terms", terms},
              {"ground_level_power_dbm", num(ground_level_power(b))},
              {"rx_power_dbm", num(b.rx_power)},
              {"noise_floor_dbm", num(b.noise_floor)},
              {"predicted_snr", num(b.predicted_snr)}};
}

std::string budget_csv(const LinkBudget& b, double rbw) {
  std::string s = csv_header("ledger", "dBm", rbw);
  s += "transmit,0," + format_number(b.tx_power) + "\n";
  for (std::size_t i = 0; i < b.terms.size(); ++i)
    s += b.terms[i].label + "," + format_number(b.terms[i].db) + "," +
         format_number(b.checkpoints[i].power_dbm) + "\n";
  return s;
}

Json heterodyne_json(const HeterodyneRun& r) {
  return Json{{"tone_kind", std::string(to_string(r.tone.kind))},
              {"offset_hz", num(r.tone.offset)},
              {"signal_amplitude_v_per_m", num(r.tone.amplitude)},
              {"local_field_v_per_m", num(r.op.e_loc)},
              {"operating_transmission", num(r.response.transmission)},
              {"slope_per_v_per_m", num(r.response.slope)},
              {"noise_rms_v_per_m", num(r.noise_rms)},
              {"sample_rate_hz", num(r.trace.sample_rate)},
              {"duration_s", num(r.trace.duration)},
              {"rbw_hz", num(r.spectrum.rbw)},
              {"signal_band_hz", Json::array({num(r.signal_band.first), num(r.signal_band.second)})},
              {"signal_frequency_hz", num(r.snr.signal_frequency)},
              {"signal_power_db", num(r.snr.signal_power)},
              {"noise_floor_db", num(r.snr.noise_floor)},
              {"measured_snr", num(r.snr.snr)}};
}

struct Outputs {
  std::string csv;
  Json results;
};

Outputs cmd_eit_spectrum(const Scenario& s, const fs::path&) {
  const Spectrum spec = scenario_eit_spectrum(s);
  const double floor = *std::min_element(spec.y.begin(), spec.y.end());
  const double top = *std::max_element(spec.y.begin(), spec.y.end());
  Json peaks = Json::array();
  for (const auto& p : find_peaks(spec, SplittingOptions{}.relative_prominence * (top - floor)))
    peaks.push_back(peak_json(p));
  return {spectrum_csv(spec),
          Json{{"points", spec.x.size()}, {"max_transmission", num(top)}, {"min_transmission", num(floor)},
               {"peaks", peaks}}};
}

Outputs cmd_at_infer(const Scenario& s, const fs::path&) {
  const AtInference r = run_at_inference(s);
  const double lo = r.lower.height, hi = r.upper.height;
  return {spectrum_csv(r.spectrum),
          Json{{"lower_peak", peak_json(r.lower)},
               {"upper_peak", peak_json(r.upper)},
               {"splitting_hz", num(r.splitting_hz)},
               {"peak_height_ratio", num(hi != 0.0 ? lo / hi : 0.0)},
               {"field_v_per_m", num(r.field_v_per_m)},
               {"detuning_corrected_field_v_per_m", num(r.corrected_field_v_per_m)},
               {"configured_field_v_per_m", num(r.configured_field_v_per_m)}}};
}

Outputs cmd_calibrate(const Scenario& s, const fs::path& base, const std::string& data_opt) {
  std::string data = data_opt.empty() ? s.calibration.data_file : data_opt;
  CalibrationRun run;
  if (data.empty()) {
    run = run_calibration(s);
  } else {
    fs::path p(data);
    if (data_opt.empty() && p.is_relative()) p = base / p;
    run = calibrate_points(s, read_calibration_data(p));
  }
  std::string csv = csv_header("incident-power", "V/m", s.budget.rbw_hz);
  Json pts = Json::array();
  for (std::size_t i = 0; i < run.points.size(); ++i) {
    const auto& pt = run.points[i];
    csv += format_number(pt.power_w) + "," + format_number(pt.field_v_per_m) + "\n";
    pts.push_back({{"power_dbm", num(watts_to_dbm(pt.power_w))},
                   {"field_v_per_m", num(pt.field_v_per_m)},
                   {"residual_v_per_m", num(run.calibration.residuals[i])}});
  }
  const auto& c = run.calibration;
  const auto& sr = run.sensitivity;
  return {csv,
          Json{{"source", data.empty() ? "simulated" : "data-file"},
               {"points", pts},
               {"k_v_per_m_per_sqrt_w", num(c.k)},
               {"fit_r2", num(c.fit_r2)},
               {"sensitivity",
                {{"e_min_v_per_m", num(sr.e_min)},
                 {"rbw_hz", num(sr.rbw)},
                 {"sensitivity_v_per_m_per_sqrt_hz", num(sr.sensitivity)},
                 {"sensitivity_nv_per_cm_per_sqrt_hz", num(v_per_m_to_nv_per_cm(sr.sensitivity))},
                 {"min_detectable_power_dbm", num(sr.min_detectable_power)},
                 {"dynamic_range_db", num(sr.dynamic_range)}}}}};
}

Outputs cmd_heterodyne(const Scenario& s, const fs::path&) {
  const HeterodyneRun r = run_heterodyne(s);
  return {spectrum_csv(r.spectrum), heterodyne_json(r)};
}

Outputs cmd_link_budget(const Scenario& s, const fs::path&) {
  const LinkBudget b = scenario_budget(s);
  Json j = budget_json(b);
  j["reported_snr_db"] = s.budget.reported_snr_db ? num(*s.budget.reported_snr_db) : Json(nullptr);
  return {budget_csv(b, s.budget.rbw_hz), j};
}

Outputs cmd_beacon_sim(const Scenario& s, const fs::path&) {
  if (s.heterodyne.kind != ToneKind::Beacon)
    throw Error(ErrorKind::WrongKind, "beacon-sim needs heterodyne.kind = beacon");
  const LinkBudget b = scenario_budget(s);
  const HeterodyneRun r = run_heterodyne(s);
  return {spectrum_csv(r.spectrum),
          Json{{"predicted_snr", num(b.predicted_snr)},
               {"measured_snr", num(r.snr.snr)},
               {"reported_snr_db", s.budget.reported_snr_db ? num(*s.budget.reported_snr_db) : Json(nullptr)},
               {"budget", budget_json(b)},
               {"heterodyne", heterodyne_json(r)}}};
}

Outputs cmd_modulated_sim(const Scenario& s, const fs::path&) {
  if (s.heterodyne.kind != ToneKind::SquareModulated)
    throw Error(ErrorKind::WrongKind, "modulated-sim needs heterodyne.kind = square-modulated");
  const LinkBudget b = scenario_budget(s);
  const HeterodyneRun r = run_heterodyne(s);
  // Sideband shape is read from the noise-free companion trace.
  const HeterodyneRun clean = run_heterodyne(s, 0.0);
  Json sidebands = Json::array();
  double worst = 0.0;
  for (const auto& c : measure_sidebands(clean.spectrum, clean.tone)) {
    worst = std::max(worst, std::abs(c.error_db));
    sidebands.push_back({{"order", c.predicted.order},
                         {"frequency_hz", num(c.predicted.frequency)},
                         {"predicted_rel_db", num(c.predicted.relative_db)},
                         {"measured_rel_db", num(c.measured_rel_db)},
                         {"error_db", num(c.error_db)}});
  }
  return {spectrum_csv(r.spectrum),
          Json{{"predicted_snr", num(b.predicted_snr)},
               {"measured_snr", num(r.snr.snr)},
               {"reported_snr_db", s.budget.reported_snr_db ? num(*s.budget.reported_snr_db) : Json(nullptr)},
               {"sidebands", sidebands},
               {"max_sideband_error_db", num(worst)},
               {"budget", budget_json(b)},
               {"heterodyne", heterodyne_json(r)}}};
}

struct CommandSpec {
  const char* name;
  const char* help;
};

constexpr CommandSpec kCommands[] = {
    {"eit-spectrum", "Steady-state probe transmission versus coupling detuning"},
    {"at-infer", "Infer the microwave field from the Autler-Townes splitting"},
    {"calibrate", "Fit E = k sqrt(P) and report sensitivity"},
    {"heterodyne", "Synthesize a baseband trace and measure its SNR"},
    {"link-budget", "Compose the satellite link budget ledger"},
    {"beacon-sim", "Link budget plus heterodyne beacon detection"},
    {"modulated-sim", "Square-modulated signal: sidebands and SNR"},
};

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rydberg-atom superheterodyne receiver simulator", "rydsat"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = ".", csv_opt, summary_opt, data_opt;
  for (const auto& c : kCommands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("scenario", scenario_path, "Scenario file")->required();
    sub->add_option("--out-dir", out_dir, "Directory for relative output paths");
    sub->add_option("--csv", csv_opt, "CSV output path");
    sub->add_option("--summary", summary_opt, "Summary JSON output path");
    if (std::string_view(c.name) == "calibrate")
      sub->add_option("--data", data_opt, "Measured points: power_dbm,field_v_per_m per line");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitValidation;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const fs::path scenario_file(scenario_path);
    const Scenario s = parse_scenario(read_file(scenario_file));
    const fs::path base = scenario_file.has_parent_path() ? scenario_file.parent_path() : fs::path(".");

    Outputs o;
    if (command == "eit-spectrum") o = cmd_eit_spectrum(s, base);
    else if (command == "at-infer") o = cmd_at_infer(s, base);
    else if (command == "calibrate") o = cmd_calibrate(s, base, data_opt);
    else if (command == "heterodyne") o = cmd_heterodyne(s, base);
    else if (command == "link-budget") o = cmd_link_budget(s, base);
    else if (command == "beacon-sim") o = cmd_beacon_sim(s, base);
    else o = cmd_modulated_sim(s, base);

    const auto resolve = [&](const std::string& opt, const std::string& configured, const char* ext) {
      fs::path p(!opt.empty() ? opt : !configured.empty() ? configured : s.name + "_" + command + ext);
      return p.is_relative() ? fs::path(out_dir) / p : p;
    };
    const fs::path csv_path = resolve(csv_opt, s.output.csv, ".csv");
    const fs::path summary_path = resolve(summary_opt, s.output.summary, ".json");

    Json summary{{"version", kSummaryVersion},
                 {"command", command},
                 {"scenario", s.name},
                 {"inputs", {{"scenario_text", to_text(s)}}},
                 {"results", std::move(o.results)},
                 {"outputs", {{"csv", csv_path.generic_string()}}}};
    write_file(csv_path, o.csv);
    write_file(summary_path, summary.dump(2) + "\n");
    out << command << ": wrote " << csv_path.generic_string() << " and " << summary_path.generic_string()
        << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "rydsat " << command << ": " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    err << "rydsat " << command << ": " << e.what() << "\n";
    return kExitSolver;
  }
}

}  // namespace rydsat
