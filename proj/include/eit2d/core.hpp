#pragma once

// Four-level (plus ground) open quantum system driven by a control field on
// the a1 <-> c transition, with detailed-balance population relaxation.
//
// Internal units: hbar = 1 and, by convention, the downhill rate Gamma1 = 1.
// Frequencies, rates and kB*T all share the same unit.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <string_view>
#include <tuple>

namespace eit2d {

using Complex = std::complex<double>;

/// Basis ordering of the five-state model.
enum class Level : int { g = 0, b = 1, c = 2, a2 = 3, a1 = 4 };

inline constexpr int kNumLevels = 5;
inline constexpr int kLiouvilleDim = kNumLevels * kNumLevels;

constexpr int index(Level l) { return static_cast<int>(l); }
std::string_view name(Level l);

struct LevelSystem {
  double omega_g = 0.0;
  double omega_b = 0.0;
  double omega_c = 0.0;
  double omega_a2 = 0.0;
  double omega_a1 = 0.0;
  double mu_b_a1 = 1.0;
  double mu_b_a2 = 1.0;
  double mu_a1_c = 1.0;
  double rabi = 0.0;  // Omega
  double nu_c = 0.0;  // control-field frequency

  double energy(Level l) const;
  /// omega_j - omega_k.
  double transition(Level j, Level k) const { return energy(j) - energy(k); }
  /// a1 - a2 spacing (may be negative for disorder nodes).
  double gap() const { return omega_a1 - omega_a2; }
  bool is_resonant() const;

  /// Throws DomainError unless the ground manifold {g, b, c} lies strictly
  /// below {a1, a2}, rabi >= 0 and dipoles are non-negative.
  void validate() const;

  /// Levels laid out as omega_g < omega_b < omega_c < omega_a2 < omega_a1 with
  /// a resonant control field.
  static LevelSystem resonant(double omega_g, double omega_b, double omega_c,
                              double omega_a2, double omega_a1, double rabi,
                              double mu_b_a1 = 1.0, double mu_b_a2 = 1.0);
};

struct RateSet {
  double gamma_down = 0.0;    // Gamma1: a1 -> a2
  double gamma_up = 0.0;      // Gamma2: a2 -> a1
  double gamma_b_down = 0.0;  // Gamma_b: b -> g
  double gamma_b_up = 0.0;    // Gamma_b': g -> b
  double gamma_c_down = 0.0;  // Gamma_c: c -> g
  double gamma_c_up = 0.0;    // Gamma_c': g -> c
  double deph_a1c = 0.0;
  double deph_a1b = 0.0;
  double deph_a2b = 0.0;
  double deph_bc = 0.0;

  /// Total outgoing population rate of a level.
  double population_loss(Level l) const;
  /// Pure-dephasing rate of the (j, k) coherence (zero for unlisted pairs).
  double pure_dephasing(Level j, Level k) const;
  /// (loss_j + loss_k) / 2 + pure dephasing.
  double coherence_decay(Level j, Level k) const;
  double gamma_a1c() const { return coherence_decay(Level::a1, Level::c); }

  void validate() const;
};

/// Bath description from which a RateSet is generated at a given temperature.
struct BathSpec {
  double gamma1 = 1.0;
  double gamma_b = 0.0;
  double gamma_c = 0.0;
  double deph_a1c = 0.0;
  double deph_a1b = 0.0;
  double deph_a2b = 0.0;
  double deph_bc = 0.0;
  double temperature = 0.0;  // kB*T in the same energy unit as the levels
};

/// Uphill rate fixed by detailed balance: gamma_down * exp(-delta_e / kT).
/// temperature == 0 gives 0 for a positive gap.
double detailed_balance_uphill(double gamma_down, double delta_e, double temperature);

/// Rates for `sys` in thermal equilibrium with `bath`. The a1/a2 pair relaxes
/// downhill at bath.gamma1 whichever level is lower; ground-manifold uphill
/// rates use the b-g and c-g gaps.
RateSet thermal_rates(const LevelSystem& sys, const BathSpec& bath);

struct DimerLevels {
  double eps1;
  double eps2;
  double delta_e;
};

/// Exciton levels of two coupled sites.
DimerLevels dimer_levels(double e1, double e2, double j);

inline constexpr double kSpeedOfLightCmPerPs = 0.0299792458;
inline constexpr double kBoltzmannWavenumberPerKelvin = 0.695034800;

/// 2*pi*c*x, x in cm^-1, result in rad/ps.
double wavenumber_to_rate(double wavenumber);

// --- density matrices and generators -------------------------------------

using Matrix5c = Eigen::Matrix<Complex, kNumLevels, kNumLevels>;

class DensityMatrix {
 public:
  DensityMatrix() : rho_(Matrix5c::Zero()) {}
  explicit DensityMatrix(const Matrix5c& rho) : rho_(rho) {}

  static DensityMatrix pure(Level l);

  const Matrix5c& matrix() const { return rho_; }
  Complex operator()(Level j, Level k) const { return rho_(index(j), index(k)); }
  double population(Level l) const { return rho_(index(l), index(l)).real(); }
  Complex trace() const { return rho_.trace(); }

  double hermiticity_error() const;
  double min_eigenvalue() const;

  /// Throws InputError when the state is not Hermitian within `tol`.
  void require_hermitian(double tol = 1e-10) const;

  Eigen::VectorXcd vectorized() const;
  static DensityMatrix from_vector(const Eigen::VectorXcd& v);

 private:
  Matrix5c rho_;
};

/// Generator acting on column-major vec(rho): index i + 5*j <-> rho(i, j).
struct Superoperator {
  Eigen::MatrixXcd matrix;

  int dim2() const { return static_cast<int>(matrix.rows()); }
  static int vec_index(Level j, Level k) { return index(j) + kNumLevels * index(k); }
  Complex operator()(Level j1, Level k1, Level j2, Level k2) const {
    return matrix(vec_index(j1, k1), vec_index(j2, k2));
  }
};

enum class Frame {
  // Level energies kept; the drive phase is removed by rotating level a1 at
  // nu_c, which makes the generator time independent for any nu_c.
  lab,
  // Interaction picture with respect to H0; requires a resonant drive.
  interaction,
};

Superoperator build_liouvillian(const LevelSystem& sys, const RateSet& rates, Frame frame);

/// Maps a state propagated with the Frame::lab generator back to the
/// laboratory frame at time t.
DensityMatrix to_lab_frame(const DensityMatrix& rotating, double nu_c, double t);

enum class PropagationMethod { matrix_exponential, runge_kutta4 };

DensityMatrix propagate(const Superoperator& gen, const DensityMatrix& rho0, double t,
                        PropagationMethod method = PropagationMethod::matrix_exponential);

}  // namespace eit2d
