#include "eit2d/core.hpp"

#include "eit2d/errors.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace eit2d {

std::string_view name(Level l) {
  switch (l) {
    case Level::g: return "g";
    case Level::b: return "b";
    case Level::c: return "c";
    case Level::a2: return "a2";
    case Level::a1: return "a1";
  }
  return "?";
}

double LevelSystem::energy(Level l) const {
  switch (l) {
    case Level::g: return omega_g;
    case Level::b: return omega_b;
    case Level::c: return omega_c;
    case Level::a2: return omega_a2;
    case Level::a1: return omega_a1;
  }
  return 0.0;
}

bool LevelSystem::is_resonant() const {
  const double target = omega_a1 - omega_c;
  return std::abs(nu_c - target) <= 1e-12 * std::max(1.0, std::abs(target));
}

void LevelSystem::validate() const {
  const std::array<double, 10> all{omega_g, omega_b, omega_c, omega_a2, omega_a1,
                                   mu_b_a1, mu_b_a2, mu_a1_c, rabi, nu_c};
  for (double v : all) {
    if (!std::isfinite(v)) throw DomainError("LevelSystem: non-finite field");
  }
  const double ground_top = std::max({omega_g, omega_b, omega_c});
  if (!(ground_top < std::min(omega_a1, omega_a2))) {
    throw DomainError("LevelSystem: ground manifold {g, b, c} must lie below a1 and a2");
  }
  if (rabi < 0.0) throw DomainError("LevelSystem: negative Rabi frequency");
  if (mu_b_a1 < 0.0 || mu_b_a2 < 0.0 || mu_a1_c < 0.0) {
    throw DomainError("LevelSystem: negative dipole magnitude");
  }
}

LevelSystem LevelSystem::resonant(double omega_g, double omega_b, double omega_c,
                                  double omega_a2, double omega_a1, double rabi,
                                  double mu_b_a1, double mu_b_a2) {
  LevelSystem s;
  s.omega_g = omega_g;
  s.omega_b = omega_b;
  s.omega_c = omega_c;
  s.omega_a2 = omega_a2;
  s.omega_a1 = omega_a1;
  s.rabi = rabi;
  s.mu_b_a1 = mu_b_a1;
  s.mu_b_a2 = mu_b_a2;
  s.nu_c = omega_a1 - omega_c;
  if (!(omega_g < omega_b && omega_b < omega_c && omega_c < omega_a2 && omega_a2 < omega_a1)) {
    throw DomainError("LevelSystem::resonant: expected g < b < c < a2 < a1");
  }
  s.validate();
  return s;
}

double RateSet::population_loss(Level l) const {
  switch (l) {
    case Level::g: return gamma_b_up + gamma_c_up;
    case Level::b: return gamma_b_down;
    case Level::c: return gamma_c_down;
    case Level::a2: return gamma_up;
    case Level::a1: return gamma_down;
  }
  return 0.0;
}

double RateSet::pure_dephasing(Level j, Level k) const {
  auto is = [&](Level x, Level y) { return (j == x && k == y) || (j == y && k == x); };
  if (is(Level::a1, Level::c)) return deph_a1c;
  if (is(Level::a1, Level::b)) return deph_a1b;
  if (is(Level::a2, Level::b)) return deph_a2b;
  if (is(Level::b, Level::c)) return deph_bc;
  return 0.0;
}

double RateSet::coherence_decay(Level j, Level k) const {
  if (j == k) return 0.0;
  return 0.5 * (population_loss(j) + population_loss(k)) + pure_dephasing(j, k);
}

void RateSet::validate() const {
  const std::array<double, 10> all{gamma_down, gamma_up, gamma_b_down, gamma_b_up, gamma_c_down,
                                   gamma_c_up, deph_a1c, deph_a1b, deph_a2b, deph_bc};
  for (double v : all) {
    if (!std::isfinite(v) || v < 0.0) throw DomainError("RateSet: rates must be finite and >= 0");
  }
}

double detailed_balance_uphill(double gamma_down, double delta_e, double temperature) {
  if (!(gamma_down >= 0.0)) throw DomainError("detailed_balance_uphill: negative downhill rate");
  if (!(delta_e >= 0.0)) {
    throw DomainError("detailed_balance_uphill: negative gap, order the levels first");
  }
  if (!(temperature >= 0.0)) throw DomainError("detailed_balance_uphill: negative temperature");
  if (delta_e == 0.0) return gamma_down;
  if (temperature == 0.0) return 0.0;
  return gamma_down * std::exp(-delta_e / temperature);
}

RateSet thermal_rates(const LevelSystem& sys, const BathSpec& bath) {
  RateSet r;
  const double gap = sys.gap();
  if (gap >= 0.0) {
    r.gamma_down = bath.gamma1;
    r.gamma_up = detailed_balance_uphill(bath.gamma1, gap, bath.temperature);
  } else {
    r.gamma_up = bath.gamma1;
    r.gamma_down = detailed_balance_uphill(bath.gamma1, -gap, bath.temperature);
  }
  r.gamma_b_down = bath.gamma_b;
  r.gamma_b_up = detailed_balance_uphill(bath.gamma_b, sys.omega_b - sys.omega_g, bath.temperature);
  r.gamma_c_down = bath.gamma_c;
  r.gamma_c_up = detailed_balance_uphill(bath.gamma_c, sys.omega_c - sys.omega_g, bath.temperature);
  r.deph_a1c = bath.deph_a1c;
  r.deph_a1b = bath.deph_a1b;
  r.deph_a2b = bath.deph_a2b;
  r.deph_bc = bath.deph_bc;
  r.validate();
  return r;
}

DimerLevels dimer_levels(double e1, double e2, double j) {
  const double diff = e1 - e2;
  const double delta_e = std::sqrt(diff * diff + 4.0 * j * j);
  return {(e1 + e2 + delta_e) / 2.0, (e1 + e2 - delta_e) / 2.0, delta_e};
}

double wavenumber_to_rate(double wavenumber) {
  return 2.0 * std::numbers::pi * kSpeedOfLightCmPerPs * wavenumber;
}

// --- DensityMatrix -----------------------------------------------------------

DensityMatrix DensityMatrix::pure(Level l) {
  Matrix5c m = Matrix5c::Zero();
  m(index(l), index(l)) = 1.0;
  return DensityMatrix(m);
}

double DensityMatrix::hermiticity_error() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  const Matrix5c h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix5c> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityMatrix::require_hermitian(double tol) const {
  if (hermiticity_error() > tol) throw InputError("density matrix is not Hermitian");
}

Eigen::VectorXcd DensityMatrix::vectorized() const {
  return Eigen::Map<const Eigen::VectorXcd>(rho_.data(), kLiouvilleDim);
}

DensityMatrix DensityMatrix::from_vector(const Eigen::VectorXcd& v) {
  if (v.size() != kLiouvilleDim) throw DomainError("DensityMatrix::from_vector: wrong size");
  return DensityMatrix(Eigen::Map<const Matrix5c>(v.data()));
}

// --- Liouvillian -------------------------------------------------------------

namespace {

Matrix5c ket_bra(Level j, Level k) {
  Matrix5c m = Matrix5c::Zero();
  m(index(j), index(k)) = 1.0;
  return m;
}

// vec(A rho B) = (B^T kron A) vec(rho)
Eigen::MatrixXcd left(const Matrix5c& a) {
  return Eigen::kroneckerProduct(Matrix5c::Identity(), a).eval();
}
Eigen::MatrixXcd right(const Matrix5c& b) {
  return Eigen::kroneckerProduct(b.transpose(), Matrix5c::Identity()).eval();
}

Eigen::MatrixXcd dissipator(const Matrix5c& jump) {
  const Matrix5c jj = jump.adjoint() * jump;
  return Eigen::kroneckerProduct(jump.conjugate(), jump).eval() - 0.5 * left(jj) - 0.5 * right(jj);
}

}  // namespace

Superoperator build_liouvillian(const LevelSystem& sys, const RateSet& rates, Frame frame) {
  sys.validate();
  rates.validate();

  Matrix5c h = Matrix5c::Zero();
  if (frame == Frame::lab) {
    for (int l = 0; l < kNumLevels; ++l) h(l, l) = sys.energy(static_cast<Level>(l));
    h(index(Level::a1), index(Level::a1)) -= sys.nu_c;
  } else if (!sys.is_resonant()) {
    throw ConfigurationError("interaction frame requires nu_c = omega_a1 - omega_c");
  }
  h -= 0.5 * sys.rabi * (ket_bra(Level::a1, Level::c) + ket_bra(Level::c, Level::a1));

  const Complex i(0.0, 1.0);
  Eigen::MatrixXcd gen = -i * (left(h) - right(h));

  struct Channel {
    double rate;
    Level to;
    Level from;
  };
  const std::array<Channel, 6> channels{{
      {rates.gamma_down, Level::a2, Level::a1},
      {rates.gamma_up, Level::a1, Level::a2},
      {rates.gamma_b_down, Level::g, Level::b},
      {rates.gamma_b_up, Level::b, Level::g},
      {rates.gamma_c_down, Level::g, Level::c},
      {rates.gamma_c_up, Level::c, Level::g},
  }};
  for (const auto& ch : channels) {
    if (ch.rate > 0.0) gen += ch.rate * dissipator(ket_bra(ch.to, ch.from));
  }

  for (int j = 0; j < kNumLevels; ++j) {
    for (int k = 0; k < kNumLevels; ++k) {
      if (j == k) continue;
      const double g0 = rates.pure_dephasing(static_cast<Level>(j), static_cast<Level>(k));
      if (g0 != 0.0) gen(j + kNumLevels * k, j + kNumLevels * k) -= g0;
    }
  }
  return Superoperator{std::move(gen)};
}

DensityMatrix to_lab_frame(const DensityMatrix& rotating, double nu_c, double t) {
  Matrix5c m = rotating.matrix();
  const int a1 = index(Level::a1);
  const Complex phase = std::polar(1.0, -nu_c * t);
  m.row(a1) *= phase;
  m.col(a1) *= std::conj(phase);
  return DensityMatrix(m);
}

DensityMatrix propagate(const Superoperator& gen, const DensityMatrix& rho0, double t,
                        PropagationMethod method) {
  if (!(t >= 0.0)) throw DomainError("propagate: negative time");
  rho0.require_hermitian(1e-10);
  if (t == 0.0) return rho0;

  const Eigen::VectorXcd v0 = rho0.vectorized();
  if (method == PropagationMethod::matrix_exponential) {
    const Eigen::MatrixXcd step = (gen.matrix * t).exp();
    return DensityMatrix::from_vector(step * v0);
  }

  const double scale = gen.matrix.cwiseAbs().maxCoeff();
  const double h_max = scale > 0.0 ? 1e-3 / scale : t;
  const auto n = static_cast<long>(std::ceil(t / h_max));
  const double h = t / static_cast<double>(n);
  Eigen::VectorXcd v = v0;
  for (long s = 0; s < n; ++s) {
    const Eigen::VectorXcd k1 = gen.matrix * v;
    const Eigen::VectorXcd k2 = gen.matrix * (v + 0.5 * h * k1);
    const Eigen::VectorXcd k3 = gen.matrix * (v + 0.5 * h * k2);
    const Eigen::VectorXcd k4 = gen.matrix * (v + h * k3);
    v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return DensityMatrix::from_vector(v);
}

}  // namespace eit2d
