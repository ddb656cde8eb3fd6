#include <algorithm>
#include <cmath>
#include <sstream>

#include "rydsat/atomic.hpp"
#include "rydsat/errors.hpp"

namespace rydsat {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b* (embedded 4th-order weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

using Rhs = std::function<Matrix4c(double, const Matrix4c&)>;

void restore_invariants(Matrix4c& rho) {
  rho = 0.5 * (rho + rho.adjoint());
  const double tr = rho.trace().real();
  rho /= tr;
}

/// Adaptive DP45 from t0 to t1. `dt` carries the step-size guess in and out.
void integrate(const Rhs& f, Matrix4c& y, double t0, double t1, double dt_max, double& dt,
               const EvolveOptions& opts) {
  double t = t0;
  Matrix4c k1 = f(t, y);
  while (t < t1) {
    double h = std::min({dt, dt_max, t1 - t});
    for (;;) {
      const bool last = h >= t1 - t;
      if (h < opts.dt_min && !last) {
        std::ostringstream os;
        os << "step size " << h << " s fell below floor " << opts.dt_min << " s at t = " << t;
        throw Error(ErrorKind::StepSizeUnderflow, os.str());
      }
      const Matrix4c k2 = f(t + c2 * h, y + h * (a21 * k1));
      const Matrix4c k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      const Matrix4c k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const Matrix4c k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Matrix4c k6 =
          f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Matrix4c y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Matrix4c k7 = f(t + h, y_new);
      const Matrix4c err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double err_norm = 0.0;
      for (int i = 0; i < 16; ++i) {
        const double sc = opts.atol + opts.rtol * std::max(std::abs(y(i)), std::abs(y_new(i)));
        err_norm = std::max(err_norm, std::abs(err(i)) / sc);
      }
      if (err_norm <= 1.0 || (h <= opts.dt_min && last)) {
        t = last ? t1 : t + h;
        y = y_new;
        restore_invariants(y);
        k1 = f(t, y);
        const double grow = err_norm > 0.0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
        // A truncated final step says little about the next one.
        if (!last || h >= dt) dt = h * std::clamp(grow, 0.2, 5.0);
        break;
      }
      h *= std::clamp(0.9 * std::pow(err_norm, -0.2), 0.1, 0.9);
    }
  }
}

double initial_step(const LadderSystem& sys, double dt_max) {
  const double rate = sys.max_rate();
  const double guess = rate > 0.0 ? 0.01 / rate : dt_max;
  return std::min(guess, dt_max);
}

void check_step_args(double dt_max) {
  if (!(dt_max > 0.0) || !std::isfinite(dt_max))
    throw Error(ErrorKind::ValidationError, "dt_max must be positive and finite");
}

}  // namespace

DensityMatrix evolve(const LadderSystem& sys, const DensityMatrix& rho0, double duration,
                     double dt_max, const EvolveOptions& opts) {
  sys.validate();
  check_step_args(dt_max);
  if (!(duration >= 0.0) || !std::isfinite(duration))
    throw Error(ErrorKind::ValidationError, "duration must be >= 0 and finite");
  if (duration == 0.0) return rho0;

  Matrix4c y = rho0.matrix();
  double dt = initial_step(sys, dt_max);
  const Rhs f = [&sys](double, const Matrix4c& rho) { return lindblad_rhs(sys, rho); };
  integrate(f, y, 0.0, duration, dt_max, dt, opts);
  return DensityMatrix::from_matrix_normalized(y);
}

void evolve_driven(const LadderSystem& sys, const DensityMatrix& rho0,
                   const std::function<double(double)>& omega_mw_at,
                   const std::vector<double>& sample_times, double dt_max,
                   const std::function<void(double, const Matrix4c&)>& observer,
                   const EvolveOptions& opts) {
  sys.validate();
  check_step_args(dt_max);
  if (!std::is_sorted(sample_times.begin(), sample_times.end()))
    throw Error(ErrorKind::ValidationError, "sample times must be nondecreasing");

  const Rhs f = [&sys, &omega_mw_at](double t, const Matrix4c& rho) {
    LadderSystem s = sys;
    s.omega_mw = omega_mw_at(t);
    return lindblad_rhs(s, rho);
  };
  Matrix4c y = rho0.matrix();
  double dt = initial_step(sys, dt_max);
  double t = 0.0;
  for (double ts : sample_times) {
    if (ts > t) {
      integrate(f, y, t, ts, dt_max, dt, opts);
      t = ts;
    }
    observer(t, y);
  }
}

}  // namespace rydsat
