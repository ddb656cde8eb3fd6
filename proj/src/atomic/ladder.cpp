#include <algorithm>
#include <cmath>
#include <sstream>

#include "rydsat/atomic.hpp"
#include "rydsat/errors.hpp"
#include "rydsat/units.hpp"

namespace rydsat {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_nonnegative(double value, const char* field) {
  if (!std::isfinite(value) || value < 0.0) {
    std::ostringstream os;
    os << field << " must be finite and >= 0 (got " << value << ")";
    throw Error(ErrorKind::ValidationError, os.str());
  }
}

void require_finite(double value, const char* field) {
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::ValidationError, std::string(field) + " must be finite");
  }
}

// (A kron B)(4i + k, 4j + l) = A(i, j) B(k, l)
Liouvillian kron(const Matrix4c& a, const Matrix4c& b) {
  Liouvillian out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
  return out;
}

// sqrt(rate) |lower><upper|
Matrix4c lowering(int lower, int upper, double rate) {
  Matrix4c c = Matrix4c::Zero();
  c(lower, upper) = std::sqrt(rate);
  return c;
}

Matrix4c projector(int level, double rate) {
  Matrix4c c = Matrix4c::Zero();
  c(level, level) = std::sqrt(rate);
  return c;
}

template <typename Visitor>
void for_each_jump_operator(const LadderSystem& sys, Visitor&& visit) {
  for (int k = 0; k < 3; ++k)
    if (sys.gamma[k] > 0.0) visit(lowering(k, k + 1, sys.gamma[k]));
  for (int k = 0; k < 4; ++k)
    if (sys.gamma_deph[k] > 0.0) visit(projector(k, 2.0 * sys.gamma_deph[k]));
}

}  // namespace

void LadderSystem::validate() const {
  require_finite(delta_p, "delta_p");
  require_finite(delta_c, "delta_c");
  require_finite(delta_mw, "delta_mw");
  require_nonnegative(omega_p, "omega_p");
  require_nonnegative(omega_c, "omega_c");
  require_nonnegative(omega_mw, "omega_mw");
  static constexpr const char* kGammaNames[] = {"gamma_21", "gamma_32", "gamma_43"};
  for (int k = 0; k < 3; ++k) require_nonnegative(gamma[k], kGammaNames[k]);
  static constexpr const char* kDephNames[] = {"gamma_deph[1]", "gamma_deph[2]", "gamma_deph[3]",
                                               "gamma_deph[4]"};
  for (int k = 0; k < 4; ++k) require_nonnegative(gamma_deph[k], kDephNames[k]);
}

double LadderSystem::max_rate() const {
  double m = std::max({std::abs(delta_p), std::abs(delta_c), std::abs(delta_mw), omega_p, omega_c,
                       omega_mw});
  for (double g : gamma) m = std::max(m, g);
  for (double g : gamma_deph) m = std::max(m, g);
  return m;
}

std::array<double, 3> LadderSystem::default_decay_rates() {
  return {hz_to_rad_s(5.2e6), hz_to_rad_s(1e3), hz_to_rad_s(1e3)};
}

// ---------------------------------------------------------------------------

DensityMatrix DensityMatrix::pure(int level) {
  if (level < 0 || level > 3) throw Error(ErrorKind::InvalidState, "level index out of range");
  Matrix4c rho = Matrix4c::Zero();
  rho(level, level) = 1.0;
  return DensityMatrix(rho);
}

std::optional<std::string> DensityMatrix::check(const Matrix4c& rho) {
  if (!rho.allFinite()) return "non-finite entries";
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol) return "not Hermitian (max |rho - rho^H| = " + std::to_string(herm) + ")";
  const Complex tr = rho.trace();
  if (std::abs(tr - 1.0) > kTraceTol) return "trace differs from 1 by " + std::to_string(std::abs(tr - 1.0));
  for (int i = 0; i < 4; ++i) {
    const double p = rho(i, i).real();
    if (p < -kEigenTol || p > 1.0 + kEigenTol) return "diagonal entry outside [0, 1]";
  }
  const Eigen::SelfAdjointEigenSolver<Matrix4c> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kEigenTol)
    return "negative eigenvalue " + std::to_string(es.eigenvalues().minCoeff());
  return std::nullopt;
}

DensityMatrix DensityMatrix::from_matrix(const Matrix4c& rho) {
  if (auto why = check(rho)) throw Error(ErrorKind::InvalidState, *why);
  return DensityMatrix(rho);
}

DensityMatrix DensityMatrix::from_matrix_normalized(const Matrix4c& rho) {
  Matrix4c sym = 0.5 * (rho + rho.adjoint());
  const double tr = sym.trace().real();
  if (!(tr > 0.0)) throw Error(ErrorKind::InvalidState, "nonpositive trace");
  sym /= tr;
  for (int i = 0; i < 4; ++i) sym(i, i) = sym(i, i).real();
  return from_matrix(sym);
}

// ---------------------------------------------------------------------------

Matrix4c build_hamiltonian(const LadderSystem& sys) {
  Matrix4c h = Matrix4c::Zero();
  h(1, 1) = -sys.delta_p;
  h(2, 2) = -(sys.delta_p + sys.delta_c);
  h(3, 3) = -(sys.delta_p + sys.delta_c + sys.delta_mw);
  h(0, 1) = h(1, 0) = 0.5 * sys.omega_p;
  h(1, 2) = h(2, 1) = 0.5 * sys.omega_c;
  h(2, 3) = h(3, 2) = 0.5 * sys.omega_mw;
  return h;
}

Matrix4c lindblad_rhs(const LadderSystem& sys, const Matrix4c& rho) {
  const Matrix4c h = build_hamiltonian(sys);
  Matrix4c out = -kI * (h * rho - rho * h);
  for_each_jump_operator(sys, [&](const Matrix4c& c) {
    const Matrix4c cdc = c.adjoint() * c;
    out += c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc);
  });
  return out;
}

Matrix4c lindblad_rhs(const LadderSystem& sys, const DensityMatrix& rho) {
  return lindblad_rhs(sys, rho.matrix());
}

Liouvillian build_liouvillian(const LadderSystem& sys) {
  // vec(A X B) = (B^T kron A) vec(X), column-major vec
  const Matrix4c id = Matrix4c::Identity();
  const Matrix4c h = build_hamiltonian(sys);
  Liouvillian l = -kI * kron(id, h) + kI * kron(h.transpose(), id);
  for_each_jump_operator(sys, [&](const Matrix4c& c) {
    const Matrix4c cdc = c.adjoint() * c;
    l += kron(c.conjugate(), c) - 0.5 * kron(id, cdc) - 0.5 * kron(cdc.transpose(), id);
  });
  return l;
}

DensityMatrix steady_state(const LadderSystem& sys) {
  sys.validate();
  const double scale = sys.max_rate();
  if (!(scale > 0.0)) throw Error(ErrorKind::SingularLiouvillian, "all rates are zero");

  Liouvillian a = build_liouvillian(sys) / scale;
  Eigen::Matrix<Complex, 16, 1> b = Eigen::Matrix<Complex, 16, 1>::Zero();
  // Replace the first equation with trace(rho) = 1.
  a.row(0).setZero();
  for (int k = 0; k < 4; ++k) a(0, 5 * k) = 1.0;
  b(0) = 1.0;

  Eigen::FullPivLU<Liouvillian> lu(a);
  lu.setThreshold(1e-11);
  if (lu.rank() < 16) {
    throw Error(ErrorKind::SingularLiouvillian,
                "stationary state is not unique (rank " + std::to_string(lu.rank()) + " of 16)");
  }
  const Eigen::Matrix<Complex, 16, 1> x = lu.solve(b);
  Matrix4c rho = Eigen::Map<const Matrix4c>(x.data());
  return DensityMatrix::from_matrix_normalized(rho);
}

// ---------------------------------------------------------------------------

double probe_absorption(const DensityMatrix& rho) { return rho(0, 1).imag(); }

}  // namespace rydsat
