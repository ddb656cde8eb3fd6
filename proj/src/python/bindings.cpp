#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rydsat/atomic.hpp"
#include "rydsat/cli.hpp"
#include "rydsat/errors.hpp"
#include "rydsat/field_inference.hpp"
#include "rydsat/heterodyne.hpp"
#include "rydsat/link_budget.hpp"
#include "rydsat/pipelines.hpp"
#include "rydsat/scenario.hpp"

namespace py = pybind11;
using namespace rydsat;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rydberg-atom superheterodyne receiver simulator";

  // Messages start with the error kind, e.g. "NoSplitting: ...".
  py::register_exception<Error>(m, "RydsatError", PyExc_RuntimeError);

  py::enum_<AxisKind>(m, "AxisKind")
      .value("CouplingDetuning", AxisKind::CouplingDetuning)
      .value("BasebandFrequency", AxisKind::BasebandFrequency);

  py::class_<Spectrum>(m, "Spectrum")
      .def_readonly("axis_kind", &Spectrum::axis_kind)
      .def_readonly("x", &Spectrum::x)
      .def_readonly("y", &Spectrum::y)
      .def_readonly("rbw", &Spectrum::rbw)
      .def_property_readonly("y_unit", [](const Spectrum& s) { return std::string(s.y_unit()); });

  // Python users get the physical decay rates by default; zero rates are singular.
  py::class_<LadderSystem>(m, "LadderSystem")
      .def(py::init([] {
        LadderSystem s;
        s.gamma = LadderSystem::default_decay_rates();
        return s;
      }))
      .def_readwrite("delta_p", &LadderSystem::delta_p)
      .def_readwrite("delta_c", &LadderSystem::delta_c)
      .def_readwrite("delta_mw", &LadderSystem::delta_mw)
      .def_readwrite("omega_p", &LadderSystem::omega_p)
      .def_readwrite("omega_c", &LadderSystem::omega_c)
      .def_readwrite("omega_mw", &LadderSystem::omega_mw)
      .def_readwrite("gamma", &LadderSystem::gamma)
      .def_readwrite("gamma_deph", &LadderSystem::gamma_deph)
      .def_static("default_decay_rates", &LadderSystem::default_decay_rates);

  m.def("steady_state", [](const LadderSystem& s) { return steady_state(s).matrix(); },
        "Stationary 4x4 density matrix (rad/s inputs).");
  m.def("build_hamiltonian", &build_hamiltonian);
  m.def(
      "eit_spectrum",
      [](const LadderSystem& s, double start_hz, double stop_hz, int n) {
        return eit_spectrum(s, {start_hz, stop_hz}, n);
      },
      py::arg("sys"), py::arg("start_hz"), py::arg("stop_hz"), py::arg("n_points"));

  m.def("field_from_splitting", &field_from_splitting, py::arg("delta_f_hz"), py::arg("dipole_moment_cm"));
  m.def("splitting_from_spectrum", [](const Spectrum& s) { return splitting_from_spectrum(s); });
  m.def(
      "fit_calibration",
      [](const std::vector<double>& power_w, const std::vector<double>& field) {
        if (power_w.size() != field.size()) throw Error(ErrorKind::ValidationError, "length mismatch");
        std::vector<CalibrationPoint> pts;
        for (std::size_t i = 0; i < power_w.size(); ++i) pts.push_back({power_w[i], field[i]});
        const FieldCalibration c = fit_calibration(pts);
        return py::dict(py::arg("k") = c.k, py::arg("fit_r2") = c.fit_r2, py::arg("residuals") = c.residuals);
      },
      py::arg("power_w"), py::arg("field_v_per_m"));
  m.def(
      "sensitivity_report",
      [](double e_min, double rbw, double floor, double max_lin) {
        const SensitivityReport r = sensitivity_report(e_min, rbw, floor, max_lin);
        return py::dict(py::arg("e_min") = r.e_min, py::arg("rbw") = r.rbw, py::arg("sensitivity") = r.sensitivity,
                        py::arg("min_detectable_power") = r.min_detectable_power,
                        py::arg("dynamic_range") = r.dynamic_range);
      },
      py::arg("e_min"), py::arg("rbw"), py::arg("noise_floor_dbm"), py::arg("max_linear_power_dbm"));

  m.def("path_loss", &path_loss, py::arg("freq_mhz"), py::arg("distance_km"));
  m.def(
      "antenna_gain",
      [](double diameter, double efficiency, double wavelength, double fixed_losses_db) {
        AntennaSpec a;
        a.diameter = diameter;
        a.aperture_efficiency = efficiency;
        if (fixed_losses_db != 0.0) a.fixed_losses = {{"fixed", fixed_losses_db}};
        return antenna_gain(a, wavelength);
      },
      py::arg("diameter"), py::arg("aperture_efficiency"), py::arg("wavelength"), py::arg("fixed_losses_db") = 0.0);

  m.def(
      "power_spectrum",
      [](const std::vector<double>& samples, double sample_rate, double rbw) {
        BasebandTrace t;
        t.sample_rate = sample_rate;
        t.samples = samples;
        t.duration = static_cast<double>(samples.size()) / sample_rate;
        return power_spectrum(t, rbw);
      },
      py::arg("samples"), py::arg("sample_rate"), py::arg("rbw"));

  m.def("scenario_to_text", [](const std::string& text) { return to_text(parse_scenario(text)); },
        "Parse a scenario document and return its canonical text.");
  m.def(
      "link_budget",
      [](const std::string& text) {
        const LinkBudget b = scenario_budget(parse_scenario(text));
        py::list terms;
        for (std::size_t i = 0; i < b.terms.size(); ++i)
          terms.append(py::make_tuple(b.terms[i].label, b.terms[i].db, b.checkpoints[i].power_dbm));
        return py::dict(py::arg("terms") = terms, py::arg("rx_power") = b.rx_power,
                        py::arg("ground_level_power") = ground_level_power(b),
                        py::arg("predicted_snr") = b.predicted_snr);
      },
      py::arg("scenario_text"));

  m.def(
      "run_command",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_command(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a CLI subcommand; returns (exit_code, stdout, stderr).");
}
