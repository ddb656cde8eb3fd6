#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rydsat/spectrum.hpp"

namespace rydsat {

using Complex = std::complex<double>;
using Matrix4c = Eigen::Matrix<Complex, 4, 4>;
using Liouvillian = Eigen::Matrix<Complex, 16, 16>;

/// Four-level ladder |1> -> |2> -> |3> -> |4> (probe, coupling, microwave).
/// All quantities are angular frequencies in rad/s.
struct LadderSystem {
  double delta_p = 0.0;
  double delta_c = 0.0;
  double delta_mw = 0.0;
  double omega_p = 0.0;
  double omega_c = 0.0;
  double omega_mw = 0.0;
  /// Population decay 2->1, 3->2, 4->3.
  std::array<double, 3> gamma{0.0, 0.0, 0.0};
  /// Pure dephasing per level; coherence rho_ij gains an extra decay
  /// rate gamma_deph[i] + gamma_deph[j].
  std::array<double, 4> gamma_deph{0.0, 0.0, 0.0, 0.0};

  /// Throws ValidationError naming the offending field.
  void validate() const;

  double max_rate() const;

  /// Cs 6S1/2 -> 6P3/2 -> nD5/2 -> (n+1)P3/2 defaults: 5.2 MHz, 1 kHz, 1 kHz.
  static std::array<double, 3> default_decay_rates();

  bool operator==(const LadderSystem&) const = default;
};

/// 4x4 Hermitian, unit-trace, positive semidefinite state.
class DensityMatrix {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kEigenTol = 1e-10;

  /// |level><level| with level in [0, 4).
  static DensityMatrix pure(int level);

  /// Validates all invariants; throws InvalidState on violation.
  static DensityMatrix from_matrix(const Matrix4c& rho);

  /// Hermitian-symmetrizes and renormalizes the trace, then validates.
  static DensityMatrix from_matrix_normalized(const Matrix4c& rho);

  /// Description of the first violated invariant, or nullopt.
  static std::optional<std::string> check(const Matrix4c& rho);

  const Matrix4c& matrix() const noexcept { return rho_; }
  Complex operator()(int i, int j) const { return rho_(i, j); }
  double population(int level) const { return rho_(level, level).real(); }

 private:
  explicit DensityMatrix(const Matrix4c& rho) : rho_(rho) {}
  Matrix4c rho_;
};

/// H / hbar in rad/s (rotating frame, RWA).
Matrix4c build_hamiltonian(const LadderSystem& sys);

/// d(rho)/dt for an arbitrary 4x4 matrix (no invariant checks).
Matrix4c lindblad_rhs(const LadderSystem& sys, const Matrix4c& rho);
Matrix4c lindblad_rhs(const LadderSystem& sys, const DensityMatrix& rho);

/// Superoperator acting on column-major vec(rho).
Liouvillian build_liouvillian(const LadderSystem& sys);

/// Unique stationary state of the master equation.
/// Throws SingularLiouvillian when the stationary state is not unique.
DensityMatrix steady_state(const LadderSystem& sys);

struct EvolveOptions {
  double rtol = 1e-10;
  double atol = 1e-13;
  double dt_min = 1e-18;  // s
};

/// Dormand-Prince 5(4) integration of the master equation from rho0 over
/// `duration` seconds with steps no longer than dt_max.
/// Throws StepSizeUnderflow if the controller wants a step below dt_min.
DensityMatrix evolve(const LadderSystem& sys, const DensityMatrix& rho0, double duration,
                     double dt_max, const EvolveOptions& opts = {});

/// Same integrator with a time-dependent microwave Rabi frequency.
/// `observer(t, rho)` is called at each of the requested sample times.
void evolve_driven(const LadderSystem& sys, const DensityMatrix& rho0,
                   const std::function<double(double)>& omega_mw_at,
                   const std::vector<double>& sample_times, double dt_max,
                   const std::function<void(double, const Matrix4c&)>& observer,
                   const EvolveOptions& opts = {});

// ---------------------------------------------------------------------------
// Doppler averaging

enum class BeamGeometry { CounterPropagating, CoPropagating };

struct DopplerModel {
  double temperature = 300.0;             // K
  double probe_wavelength = 852.357e-9;   // m
  double coupling_wavelength = 509.236e-9;
  int n_velocity = 4001;                  // odd, >= 11; the EIT velocity class is ~1 m/s wide
  double atomic_mass = 0.0;               // kg; 0 selects Cs-133
  double span_sigmas = 4.0;               // grid covers +-span_sigmas * v_thermal
  BeamGeometry geometry = BeamGeometry::CounterPropagating;

  void validate() const;
  /// 1-D thermal velocity spread sqrt(kT/m), m/s.
  double thermal_velocity() const;
};

struct VelocityClass {
  double velocity;  // m/s
  double weight;
};

/// Trapezoid-weighted Maxwell-Boltzmann grid; weights sum to 1.
std::vector<VelocityClass> velocity_grid(const DopplerModel& model);

/// Detuning shifts seen by atoms moving at velocity v along the probe beam.
LadderSystem doppler_shifted(const LadderSystem& sys, const DopplerModel& model, double velocity);

// ---------------------------------------------------------------------------
// Probe observables and spectra

/// Probe absorption, proportional to Im(rho_12) = -Im(rho_21).
double probe_absorption(const DensityMatrix& rho);

/// Steady-state probe absorption, velocity-averaged when a model is given.
double mean_probe_absorption(const LadderSystem& sys, const std::optional<DopplerModel>& doppler);

/// Affine map from absorption to the transmission proxy. The baseline is the
/// two-level absorption (no coupling, no microwave); the scale makes the
/// field-free EIT peak at two-photon resonance exactly 1.
struct TransmissionScale {
  double baseline_absorption = 0.0;
  double peak_absorption = 0.0;

  static TransmissionScale for_system(const LadderSystem& sys,
                                      const std::optional<DopplerModel>& doppler);
  double operator()(double absorption) const {
    return (baseline_absorption - absorption) / (baseline_absorption - peak_absorption);
  }
};

/// Steady-state transmission at the system's own detunings.
double probe_transmission(const LadderSystem& sys, const TransmissionScale& scale,
                          const std::optional<DopplerModel>& doppler = std::nullopt);

/// Sweeps the coupling detuning over [start, stop] Hz.
Spectrum eit_spectrum(const LadderSystem& sys_template, std::pair<double, double> delta_c_range_hz,
                      int n_points, const std::optional<DopplerModel>& doppler = std::nullopt);

}  // namespace rydsat
