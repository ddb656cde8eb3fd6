#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "rydsat/cli.hpp"
#include "rydsat/errors.hpp"
#include "rydsat/pipelines.hpp"
#include "rydsat/scenario.hpp"
#include "rydsat/units.hpp"

using namespace rydsat;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = RYDSAT_SCENARIO_DIR;

const char* kMinimal =
    "[atomic]\n"
    "probe_rabi_hz = 1e6\n"
    "coupling_rabi_hz = 3e6\n"
    "mw_rabi_hz = 0\n"
    "dipole_moment_ea0 = 1000\n";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::pair<ErrorKind, std::string> error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return {e.kind(), e.what()};
  }
  FAIL("no error thrown");
  return {ErrorKind::IoError, ""};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("rydsat_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("parse: bundled beacon scenario reaches the budget checkpoints") {
  const Scenario s = parse_scenario(slurp(kScenarios / "beacon_geo.scenario"));
  CHECK(s.name == "beacon_geo");
  const LinkBudget b = scenario_budget(s);
  CHECK(ground_level_power(b) == doctest::Approx(-148.0).epsilon(0.5 / 148.0));
  CHECK(b.rx_power == doctest::Approx(-100.0).epsilon(0.5 / 100.0));
}

TEST_CASE("parse: every bundled scenario parses and round-trips") {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(kScenarios)) {
    if (entry.path().extension() != ".scenario") continue;
    ++count;
    const Scenario s = parse_scenario(slurp(entry.path()));
    CHECK(parse_scenario(to_text(s)) == s);
    CHECK(to_text(parse_scenario(to_text(s))) == to_text(s));
  }
  CHECK(count >= 5);
}

TEST_CASE("parse: empty document lists the required fields") {
  const auto [kind, msg] = error_of([] { parse_scenario(""); });
  CHECK(kind == ErrorKind::ValidationError);
  for (const char* f : {"probe_rabi_hz", "coupling_rabi_hz", "mw_rabi_hz", "dipole_moment_ea0"})
    CHECK(msg.find(f) != std::string::npos);
}

TEST_CASE("parse: negative Rabi frequency names the field") {
  std::string text = kMinimal;
  text.replace(text.find("probe_rabi_hz = 1e6"), 19, "probe_rabi_hz = -1e6");
  const auto [kind, msg] = error_of([&] { parse_scenario(text); });
  CHECK(kind == ErrorKind::ValidationError);
  CHECK(msg.find("atomic.probe_rabi_hz") != std::string::npos);
}

TEST_CASE("parse: syntax errors carry the line number") {
  const struct {
    const char* text;
    const char* needle;
  } cases[] = {
      {"[atomic]\nbogus = 1\n", "line 2"},
      {"[nowhere]\n", "line 1"},
      {"probe_rabi_hz = 1\n", "outside"},
      {"[atomic]\nprobe_rabi_hz = 1\nprobe_rabi_hz = 2\n", "duplicate"},
      {"[atomic]\n\nprobe_rabi_hz = fast\n", "line 3"},
      {"[atomic]\nprobe_rabi_hz\n", "line 2"},
      {"[atomic\n", "unterminated"},
      {"[heterodyne]\nkind = chirp\n", "kind"},
  };
  for (const auto& c : cases) {
    const auto [kind, msg] = error_of([&] { parse_scenario(c.text); });
    CHECK(kind == ErrorKind::ParseError);
    CHECK_MESSAGE(msg.find(c.needle) != std::string::npos, msg);
  }
}

TEST_CASE("parse: Hz inputs become rad/s once") {
  const Scenario s = parse_scenario(kMinimal);
  CHECK(s.ladder.omega_p == doctest::Approx(two_pi * 1e6).epsilon(1e-15));
  CHECK(s.ladder.gamma[0] == doctest::Approx(two_pi * 5.2e6).epsilon(1e-15));
  CHECK_FALSE(s.doppler().has_value());
}

TEST_CASE("cli: usage errors exit 2") {
  CHECK(run({}) == kExitValidation);
  CHECK(run({"link-budget"}) == kExitValidation);
  CHECK(run({"no-such-command", "x"}) == kExitValidation);
  CHECK(run({"--help"}) == kExitOk);
}

TEST_CASE("cli: error categories map to exit codes") {
  TempDir tmp("codes");
  const auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(tmp.path / name) << text;
    return (tmp.path / name).string();
  };
  const std::string out = tmp.path.string();
  CHECK(run({"link-budget", (tmp.path / "missing.scenario").string(), "--out-dir", out}) == kExitIo);
  CHECK(run({"link-budget", write("bad.scenario", "[atomic]\nx = 1\n"), "--out-dir", out}) == kExitValidation);
  // Field-free spectrum has a single peak.
  CHECK(run({"at-infer", write("single.scenario", kMinimal), "--out-dir", out}) == kExitSolver);
  const std::string fine = std::string(kMinimal) + "[heterodyne]\nduration_s = 0.5\nrbw_hz = 1\n";
  CHECK(run({"heterodyne", write("fine.scenario", fine), "--out-dir", out}) == kExitDsp);
  // A regular file used as a directory cannot be written through.
  const std::string ok = write("ok.scenario", kMinimal);
  CHECK(run({"link-budget", ok, "--csv", (fs::path(ok) / "x.csv").string()}) == kExitIo);
}

TEST_CASE("cli: beacon-sim summary and byte-identical reruns") {
  TempDir a("run_a"), b("run_b");
  const std::string scen = (kScenarios / "beacon_geo.scenario").string();
  REQUIRE(run({"beacon-sim", scen, "--out-dir", a.path.string(), "--csv", "s.csv", "--summary", "s.json"}) == 0);
  REQUIRE(run({"beacon-sim", scen, "--out-dir", b.path.string(), "--csv", "s.csv", "--summary", "s.json"}) == 0);
  const std::string csv = slurp(a.path / "s.csv");
  CHECK(csv == slurp(b.path / "s.csv"));
  CHECK(csv.rfind("# axis=baseband-frequency unit=dB rbw=1\n", 0) == 0);
  CHECK(csv.find(',') != std::string::npos);

  const auto summary = nlohmann::ordered_json::parse(slurp(a.path / "s.json"));
  CHECK(summary.begin().key() == "version");
  CHECK(summary["version"] == kSummaryVersion);
  const auto& r = summary["results"];
  CHECK(r["predicted_snr"].get<double>() == doctest::Approx(28.0).epsilon(0.5 / 28.0));
  CHECK(std::abs(r["measured_snr"].get<double>() - r["predicted_snr"].get<double>()) <= 3.0);
  CHECK(r["reported_snr_db"].get<double>() == 24.0);

  // The echoed scenario re-parses to the same Scenario.
  const Scenario echoed = parse_scenario(summary["inputs"]["scenario_text"].get<std::string>());
  CHECK(echoed == parse_scenario(slurp(kScenarios / "beacon_geo.scenario")));
}

TEST_CASE("cli: every subcommand runs on its bundled scenario") {
  TempDir tmp("all");
  const std::pair<const char*, const char*> jobs[] = {
      {"eit-spectrum", "at_resonant"},   {"at-infer", "at_offresonant"}, {"calibrate", "calibration"},
      {"heterodyne", "beacon_geo"},      {"link-budget", "beacon_geo"},  {"beacon-sim", "beacon_geo"},
      {"modulated-sim", "modulated_15k"},
  };
  for (const auto& [cmd, scen] : jobs) {
    std::string err;
    const int code = run({cmd, (kScenarios / (std::string(scen) + ".scenario")).string(), "--out-dir",
                          tmp.path.string()},
                         &err);
    CHECK_MESSAGE(code == 0, cmd << ": " << err);
    CHECK(fs::exists(tmp.path / (std::string(scen) + "_" + cmd + ".csv")));
    CHECK(fs::exists(tmp.path / (std::string(scen) + "_" + cmd + ".json")));
  }
  const std::string ledger = slurp(tmp.path / "beacon_geo_link-budget.csv");
  CHECK(ledger.rfind("# axis=ledger unit=dBm rbw=1\n", 0) == 0);
  CHECK(ledger.find("free-space path loss,") != std::string::npos);
}

TEST_CASE("cli: calibrate reads measured points from a data file") {
  TempDir tmp("data");
  std::ofstream(tmp.path / "points.csv") << "# power_dbm,field_v_per_m\n-30,0.169270\n-20, 0.535280\n-10,1.692700\n";
  std::ofstream(tmp.path / "broken.csv") << "-30;0.05\n";
  const std::string scen = (kScenarios / "calibration.scenario").string();
  REQUIRE(run({"calibrate", scen, "--data", (tmp.path / "points.csv").string(), "--out-dir", tmp.path.string(),
               "--summary", "c.json"}) == 0);
  const auto j = nlohmann::ordered_json::parse(slurp(tmp.path / "c.json"));
  CHECK(j["results"]["k_v_per_m_per_sqrt_w"].get<double>() == doctest::Approx(169.27).epsilon(1e-4));
  CHECK(j["results"]["source"] == "data-file");
  CHECK(run({"calibrate", scen, "--data", (tmp.path / "broken.csv").string(), "--out-dir", tmp.path.string()}) ==
        kExitValidation);
}

TEST_CASE("csv numbers are shortest round-trip text") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-148.5) == "-148.5");
  CHECK(format_number(1e-300) == "1e-300");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}
