#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "rydsat/errors.hpp"
#include "rydsat/scenario.hpp"
#include "rydsat/units.hpp"

namespace rydsat {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? next : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

// Value codecs. Parse failures throw std::invalid_argument with a short reason;
// the caller attaches line and key.

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw std::invalid_argument("expected a finite number, got '" + std::string(s) + "'");
  return v;
}

template <typename Int>
Int parse_integer(std::string_view s) {
  s = trim(s);
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("expected an integer, got '" + std::string(s) + "'");
  return v;
}

bool parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "off" || s == "no" || s == "0") return false;
  throw std::invalid_argument("expected true/false, got '" + std::string(s) + "'");
}

template <typename T>
struct Codec;

template <>
struct Codec<double> {
  static double parse(std::string_view s) { return parse_double(s); }
  static std::optional<std::string> format(double v) { return format_double(v); }
};

template <>
struct Codec<int> {
  static int parse(std::string_view s) { return parse_integer<int>(s); }
  static std::optional<std::string> format(int v) { return std::to_string(v); }
};

template <>
struct Codec<std::uint64_t> {
  static std::uint64_t parse(std::string_view s) { return parse_integer<std::uint64_t>(s); }
  static std::optional<std::string> format(std::uint64_t v) { return std::to_string(v); }
};

template <>
struct Codec<bool> {
  static bool parse(std::string_view s) { return parse_bool(s); }
  static std::optional<std::string> format(bool v) { return v ? "true" : "false"; }
};

template <>
struct Codec<std::string> {
  static std::string parse(std::string_view s) { return std::string(trim(s)); }
  static std::optional<std::string> format(const std::string& v) { return v; }
};

template <>
struct Codec<std::optional<double>> {
  static std::optional<double> parse(std::string_view s) { return parse_double(s); }
  static std::optional<std::string> format(const std::optional<double>& v) {
    if (!v) return std::nullopt;
    return format_double(*v);
  }
};

template <>
struct Codec<std::vector<double>> {
  static std::vector<double> parse(std::string_view s) {
    std::vector<double> out;
    if (trim(s).empty()) return out;
    for (auto item : split(s, ',')) out.push_back(parse_double(item));
    return out;
  }
  static std::optional<std::string> format(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
    return out;
  }
};

template <>
struct Codec<std::vector<BudgetTerm>> {
  static std::vector<BudgetTerm> parse(std::string_view s) {
    std::vector<BudgetTerm> out;
    if (trim(s).empty()) return out;
    for (auto item : split(s, ',')) {
      const auto colon = item.rfind(':');
      if (colon == std::string_view::npos || trim(item.substr(0, colon)).empty())
        throw std::invalid_argument("expected label:dB, got '" + std::string(item) + "'");
      out.push_back({std::string(trim(item.substr(0, colon))), parse_double(item.substr(colon + 1))});
    }
    return out;
  }
  static std::optional<std::string> format(const std::vector<BudgetTerm>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out += (i ? ", " : "") + v[i].label + ":" + format_double(v[i].db);
    return out;
  }
};

template <typename Enum>
struct EnumCodec {
  static Enum parse_named(std::string_view s, std::initializer_list<std::pair<const char*, Enum>> names) {
    s = trim(s);
    for (const auto& [name, value] : names)
      if (s == name) return value;
    std::string allowed;
    for (const auto& [name, value] : names) allowed += (allowed.empty() ? "" : "|") + std::string(name);
    throw std::invalid_argument("expected one of " + allowed + ", got '" + std::string(s) + "'");
  }
};

template <>
struct Codec<ToneKind> {
  static ToneKind parse(std::string_view s) {
    return EnumCodec<ToneKind>::parse_named(
        s, {{"beacon", ToneKind::Beacon}, {"square-modulated", ToneKind::SquareModulated}});
  }
  static std::optional<std::string> format(ToneKind v) { return std::string(to_string(v)); }
};

template <>
struct Codec<TraceMode> {
  static TraceMode parse(std::string_view s) {
    return EnumCodec<TraceMode>::parse_named(
        s, {{"linearized", TraceMode::Linearized}, {"direct", TraceMode::Direct}});
  }
  static std::optional<std::string> format(TraceMode v) {
    return v == TraceMode::Linearized ? "linearized" : "direct";
  }
};

template <>
struct Codec<BeamGeometry> {
  static BeamGeometry parse(std::string_view s) {
    return EnumCodec<BeamGeometry>::parse_named(
        s, {{"counter", BeamGeometry::CounterPropagating}, {"co", BeamGeometry::CoPropagating}});
  }
  static std::optional<std::string> format(BeamGeometry v) {
    return v == BeamGeometry::CounterPropagating ? "counter" : "co";
  }
};

struct Field {
  std::string section;
  std::string key;
  std::function<void(Scenario&, std::string_view)> parse;
  std::function<std::optional<std::string>(const Scenario&)> format;
};

template <typename T, typename Access>
Field field(const char* section, const char* key, Access access) {
  return Field{
      section, key,
      [access](Scenario& s, std::string_view v) { access(s) = Codec<T>::parse(v); },
      [access](const Scenario& s) { return Codec<T>::format(access(const_cast<Scenario&>(s))); }};
}

#define RYDSAT_FIELD(type, section, key, member) \
  field<type>(section, key, [](Scenario& s) -> type& { return s.member; })

const std::vector<Field>& field_table() {
  static const std::vector<Field> table = {
      RYDSAT_FIELD(std::string, "scenario", "name", name),

      RYDSAT_FIELD(double, "atomic", "probe_detuning_hz", atomic.probe_detuning_hz),
      RYDSAT_FIELD(double, "atomic", "coupling_detuning_hz", atomic.coupling_detuning_hz),
      RYDSAT_FIELD(double, "atomic", "mw_detuning_hz", atomic.mw_detuning_hz),
      RYDSAT_FIELD(std::optional<double>, "atomic", "probe_rabi_hz", atomic.probe_rabi_hz),
      RYDSAT_FIELD(std::optional<double>, "atomic", "coupling_rabi_hz", atomic.coupling_rabi_hz),
      RYDSAT_FIELD(std::optional<double>, "atomic", "mw_rabi_hz", atomic.mw_rabi_hz),
      RYDSAT_FIELD(double, "atomic", "gamma_21_hz", atomic.gamma_21_hz),
      RYDSAT_FIELD(double, "atomic", "gamma_32_hz", atomic.gamma_32_hz),
      RYDSAT_FIELD(double, "atomic", "gamma_43_hz", atomic.gamma_43_hz),
      RYDSAT_FIELD(std::vector<double>, "atomic", "dephasing_hz", atomic.dephasing_hz),
      RYDSAT_FIELD(std::optional<double>, "atomic", "dipole_moment_ea0", atomic.dipole_moment_ea0),
      RYDSAT_FIELD(double, "atomic", "mw_resonance_hz", atomic.mw_resonance_hz),
      RYDSAT_FIELD(bool, "atomic", "doppler", atomic.doppler),
      RYDSAT_FIELD(double, "atomic", "temperature_k", atomic.temperature_k),
      RYDSAT_FIELD(double, "atomic", "probe_wavelength_m", atomic.probe_wavelength_m),
      RYDSAT_FIELD(double, "atomic", "coupling_wavelength_m", atomic.coupling_wavelength_m),
      RYDSAT_FIELD(int, "atomic", "n_velocity", atomic.n_velocity),
      RYDSAT_FIELD(BeamGeometry, "atomic", "geometry", atomic.geometry),

      RYDSAT_FIELD(double, "sweep", "start_hz", sweep.start_hz),
      RYDSAT_FIELD(double, "sweep", "stop_hz", sweep.stop_hz),
      RYDSAT_FIELD(int, "sweep", "points", sweep.points),

      RYDSAT_FIELD(ToneKind, "heterodyne", "kind", heterodyne.kind),
      RYDSAT_FIELD(double, "heterodyne", "offset_hz", heterodyne.offset_hz),
      RYDSAT_FIELD(std::optional<double>, "heterodyne", "amplitude_v_per_m", heterodyne.amplitude_v_per_m),
      RYDSAT_FIELD(double, "heterodyne", "phase_rad", heterodyne.phase_rad),
      RYDSAT_FIELD(double, "heterodyne", "mod_rate_hz", heterodyne.mod_rate_hz),
      RYDSAT_FIELD(double, "heterodyne", "bandwidth_hz", heterodyne.bandwidth_hz),
      RYDSAT_FIELD(double, "heterodyne", "duty", heterodyne.duty),
      RYDSAT_FIELD(bool, "heterodyne", "inverted", heterodyne.inverted),
      RYDSAT_FIELD(int, "heterodyne", "harmonic_cap", heterodyne.harmonic_cap),
      RYDSAT_FIELD(std::optional<double>, "heterodyne", "e_loc_v_per_m", heterodyne.e_loc_v_per_m),
      RYDSAT_FIELD(double, "heterodyne", "local_power_dbm", heterodyne.local_power_dbm),
      RYDSAT_FIELD(std::optional<double>, "heterodyne", "noise_rms_v_per_m", heterodyne.noise_rms_v_per_m),
      RYDSAT_FIELD(double, "heterodyne", "sample_rate_hz", heterodyne.sample_rate_hz),
      RYDSAT_FIELD(double, "heterodyne", "duration_s", heterodyne.duration_s),
      RYDSAT_FIELD(std::uint64_t, "heterodyne", "seed", heterodyne.seed),
      RYDSAT_FIELD(double, "heterodyne", "rbw_hz", heterodyne.rbw_hz),
      RYDSAT_FIELD(std::optional<double>, "heterodyne", "signal_band_hz", heterodyne.signal_band_hz),
      RYDSAT_FIELD(TraceMode, "heterodyne", "mode", heterodyne.mode),

      RYDSAT_FIELD(double, "budget", "tx_power_dbm", budget.tx_power_dbm),
      RYDSAT_FIELD(double, "budget", "frequency_mhz", budget.frequency_mhz),
      RYDSAT_FIELD(double, "budget", "distance_km", budget.distance_km),
      RYDSAT_FIELD(double, "budget", "antenna_diameter_m", budget.antenna_diameter_m),
      RYDSAT_FIELD(double, "budget", "aperture_efficiency", budget.aperture_efficiency),
      RYDSAT_FIELD(std::optional<double>, "budget", "wavelength_m", budget.wavelength_m),
      RYDSAT_FIELD(std::vector<BudgetTerm>, "budget", "losses", budget.losses),
      RYDSAT_FIELD(double, "budget", "lna_gain_db", budget.lna_gain_db),
      RYDSAT_FIELD(double, "budget", "cavity_q", budget.cavity_q),
      RYDSAT_FIELD(double, "budget", "noise_floor_dbm", budget.noise_floor_dbm),
      RYDSAT_FIELD(double, "budget", "rbw_hz", budget.rbw_hz),
      RYDSAT_FIELD(std::optional<double>, "budget", "reported_snr_db", budget.reported_snr_db),

      RYDSAT_FIELD(double, "calibration", "k", calibration.k),
      RYDSAT_FIELD(std::vector<double>, "calibration", "powers_dbm", calibration.powers_dbm),
      RYDSAT_FIELD(std::string, "calibration", "data_file", calibration.data_file),
      RYDSAT_FIELD(double, "calibration", "max_linear_power_dbm", calibration.max_linear_power_dbm),

      RYDSAT_FIELD(std::string, "output", "csv", output.csv),
      RYDSAT_FIELD(std::string, "output", "summary", output.summary),
  };
  return table;
}

#undef RYDSAT_FIELD

// ---------------------------------------------------------------------------
// Validation

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorKind::ValidationError, field + ": " + why);
}

void positive(double v, const char* field) {
  if (!(v > 0.0)) invalid(field, "must be > 0");
}

void nonnegative(double v, const char* field) {
  if (!(v >= 0.0)) invalid(field, "must be >= 0");
}

void validate(const Scenario& s) {
  std::vector<std::string> missing;
  if (!s.atomic.probe_rabi_hz) missing.emplace_back("atomic.probe_rabi_hz");
  if (!s.atomic.coupling_rabi_hz) missing.emplace_back("atomic.coupling_rabi_hz");
  if (!s.atomic.mw_rabi_hz) missing.emplace_back("atomic.mw_rabi_hz");
  if (!s.atomic.dipole_moment_ea0) missing.emplace_back("atomic.dipole_moment_ea0");
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw Error(ErrorKind::ValidationError, "missing required fields: " + list);
  }

  const auto& a = s.atomic;
  nonnegative(*a.probe_rabi_hz, "atomic.probe_rabi_hz");
  nonnegative(*a.coupling_rabi_hz, "atomic.coupling_rabi_hz");
  nonnegative(*a.mw_rabi_hz, "atomic.mw_rabi_hz");
  nonnegative(a.gamma_21_hz, "atomic.gamma_21_hz");
  nonnegative(a.gamma_32_hz, "atomic.gamma_32_hz");
  nonnegative(a.gamma_43_hz, "atomic.gamma_43_hz");
  if (a.dephasing_hz.size() != 4) invalid("atomic.dephasing_hz", "needs exactly 4 entries");
  for (double d : a.dephasing_hz) nonnegative(d, "atomic.dephasing_hz");
  positive(*a.dipole_moment_ea0, "atomic.dipole_moment_ea0");
  positive(a.mw_resonance_hz, "atomic.mw_resonance_hz");
  positive(a.temperature_k, "atomic.temperature_k");
  positive(a.probe_wavelength_m, "atomic.probe_wavelength_m");
  positive(a.coupling_wavelength_m, "atomic.coupling_wavelength_m");
  if (a.n_velocity < 11 || a.n_velocity % 2 == 0) invalid("atomic.n_velocity", "must be odd and >= 11");

  if (s.sweep.points < 3) invalid("sweep.points", "must be >= 3");
  if (!(s.sweep.stop_hz > s.sweep.start_hz)) invalid("sweep.stop_hz", "must exceed sweep.start_hz");

  const auto& h = s.heterodyne;
  nonnegative(h.offset_hz, "heterodyne.offset_hz");
  if (h.amplitude_v_per_m) nonnegative(*h.amplitude_v_per_m, "heterodyne.amplitude_v_per_m");
  if (h.kind == ToneKind::SquareModulated) positive(h.mod_rate_hz, "heterodyne.mod_rate_hz");
  nonnegative(h.mod_rate_hz, "heterodyne.mod_rate_hz");
  nonnegative(h.bandwidth_hz, "heterodyne.bandwidth_hz");
  if (!(h.duty > 0.0 && h.duty < 1.0)) invalid("heterodyne.duty", "must lie in (0, 1)");
  if (h.harmonic_cap < 1) invalid("heterodyne.harmonic_cap", "must be >= 1");
  if (h.e_loc_v_per_m) positive(*h.e_loc_v_per_m, "heterodyne.e_loc_v_per_m");
  if (h.noise_rms_v_per_m) nonnegative(*h.noise_rms_v_per_m, "heterodyne.noise_rms_v_per_m");
  positive(h.sample_rate_hz, "heterodyne.sample_rate_hz");
  positive(h.duration_s, "heterodyne.duration_s");
  positive(h.rbw_hz, "heterodyne.rbw_hz");
  if (h.signal_band_hz) positive(*h.signal_band_hz, "heterodyne.signal_band_hz");

  const auto& b = s.budget;
  positive(b.frequency_mhz, "budget.frequency_mhz");
  positive(b.distance_km, "budget.distance_km");
  positive(b.antenna_diameter_m, "budget.antenna_diameter_m");
  if (!(b.aperture_efficiency > 0.0 && b.aperture_efficiency <= 1.0))
    invalid("budget.aperture_efficiency", "must lie in (0, 1]");
  if (b.wavelength_m) positive(*b.wavelength_m, "budget.wavelength_m");
  if (b.cavity_q != 0.0 && !(b.cavity_q >= 1.0)) invalid("budget.cavity_q", "must be 0 (off) or >= 1");
  positive(b.rbw_hz, "budget.rbw_hz");

  positive(s.calibration.k, "calibration.k");
  for (double p : s.calibration.powers_dbm)
    if (!std::isfinite(p)) invalid("calibration.powers_dbm", "must be finite");
}

LadderSystem build_ladder(const AtomicParams& a) {
  LadderSystem sys;
  sys.delta_p = hz_to_rad_s(a.probe_detuning_hz);
  sys.delta_c = hz_to_rad_s(a.coupling_detuning_hz);
  sys.delta_mw = hz_to_rad_s(a.mw_detuning_hz);
  sys.omega_p = hz_to_rad_s(*a.probe_rabi_hz);
  sys.omega_c = hz_to_rad_s(*a.coupling_rabi_hz);
  sys.omega_mw = hz_to_rad_s(*a.mw_rabi_hz);
  sys.gamma = {hz_to_rad_s(a.gamma_21_hz), hz_to_rad_s(a.gamma_32_hz), hz_to_rad_s(a.gamma_43_hz)};
  for (int k = 0; k < 4; ++k) sys.gamma_deph[k] = hz_to_rad_s(a.dephasing_hz[k]);
  return sys;
}

}  // namespace

std::optional<DopplerModel> Scenario::doppler() const {
  if (!atomic.doppler) return std::nullopt;
  DopplerModel m;
  m.temperature = atomic.temperature_k;
  m.probe_wavelength = atomic.probe_wavelength_m;
  m.coupling_wavelength = atomic.coupling_wavelength_m;
  m.n_velocity = atomic.n_velocity;
  m.geometry = atomic.geometry;
  return m;
}

double Scenario::dipole_moment_cm() const { return dipole_from_ea0(atomic.dipole_moment_ea0.value_or(0.0)); }

double Scenario::mw_wavelength_m() const {
  return budget.wavelength_m.value_or(constants::speed_of_light / (budget.frequency_mhz * 1e6));
}

Scenario parse_scenario(std::string_view text) {
  Scenario s;
  static const std::set<std::string> sections = {"scenario", "atomic",      "sweep", "heterodyne",
                                                  "budget",   "calibration", "output"};
  std::set<std::pair<std::string, std::string>> seen;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;

    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;

    const auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorKind::ParseError, where() + "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!sections.count(section))
        throw Error(ErrorKind::ParseError, where() + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::ParseError, where() + "expected 'key = value'");
    if (section.empty())
      throw Error(ErrorKind::ParseError, where() + "key outside of any [section]");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));

    const auto& table = field_table();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) {
      return f.section == section && f.key == key;
    });
    if (it == table.end())
      throw Error(ErrorKind::ParseError, where() + "unknown key '" + key + "' in [" + section + "]");
    if (!seen.insert({section, key}).second)
      throw Error(ErrorKind::ParseError, where() + "duplicate key '" + section + "." + key + "'");
    try {
      it->parse(s, value);
    } catch (const std::invalid_argument& e) {
      throw Error(ErrorKind::ParseError, where() + section + "." + key + ": " + e.what());
    }
  }

  validate(s);
  s.ladder = build_ladder(s.atomic);
  return s;
}

std::string to_text(const Scenario& s) {
  std::ostringstream os;
  std::string section;
  for (const auto& f : field_table()) {
    const auto value = f.format(s);
    if (!value) continue;
    if (f.section != section) {
      if (!section.empty()) os << '\n';
      section = f.section;
      os << '[' << section << "]\n";
    }
    os << f.key << " = " << *value << '\n';
  }
  return os.str();
}

}  // namespace rydsat
