#pragma once

// Green functions of the driven four-level system.
//
// Waiting period t2: population propagators over {a1a1, a2a2, cc} obtained
// from the closed population/coherence subsystem of the interaction-picture
// master equation (variables p_a1, p_a2, p_c and v = i(rho_a1c - rho_ca1)).
//
// Coherence periods t1, t3: half-sided Fourier transforms of the optical
// coherences rho_{a_j b}; the a1 coherence is dressed by the control field
// through rho_{cb}.

#include "eit2d/core.hpp"

#include <Eigen/Dense>

namespace eit2d {

/// Row/column index of a population inside PopulationGreenMatrix.
enum class Population : int { a1 = 0, a2 = 1, c = 2 };

struct PopulationGreenMatrix {
  double t = 0.0;
  /// entries(final, initial)
  Eigen::Matrix3cd entries = Eigen::Matrix3cd::Identity();

  Complex operator()(Population final_pop, Population initial_pop) const {
    return entries(static_cast<int>(final_pop), static_cast<int>(initial_pop));
  }
};

/// Real 4x4 generator of (p_a1, p_a2, p_c, v).
Eigen::Matrix4d population_generator(const RateSet& rates, double rabi);

/// Exact closed-form population propagator from the eigen-mode expansion
///   G(t) = sum_k exp(lambda_k t) P_k
/// of the population generator. Constructed once, evaluated at any t >= 0.
///
/// Mode structure (Gamma_c = 0): one conserved mode, one slow real mode that
/// reduces to exp(-(Gamma1 + Gamma2) t) without drive, and a damped pair that
/// becomes the Rabi oscillation exp((-gamma_a1c/2 +- i*Omega_tilde/2) t).
class PopulationModes {
 public:
  PopulationModes(const RateSet& rates, double rabi);

  PopulationGreenMatrix at(double t) const;

  const Eigen::Vector4cd& eigenvalues() const { return lambda_; }
  /// Index of the slow relaxation mode (real eigenvalue closest to -A1,
  /// excluding conserved modes), or -1 when there is none.
  int slow_mode() const { return slow_; }
  /// False when the generator was too close to defective for the modal
  /// expansion and evaluation falls back to a direct exponential.
  bool diagonalizable() const { return diagonalizable_; }

  /// Mutation hook used to check that verification detects a wrong residue
  /// sign of the slow mode (the term carrying 1/A3 in the printed closed form).
  void flip_slow_mode_sign() { flip_slow_ = !flip_slow_; }

 private:
  Eigen::Matrix4d generator_;
  Eigen::Vector4cd lambda_;
  std::array<Eigen::Matrix4cd, 4> projectors_;
  int slow_ = -1;
  bool diagonalizable_ = true;
  bool flip_slow_ = false;
};

PopulationGreenMatrix population_green_analytic(const RateSet& rates, double rabi, double t);

/// Constants of the printed closed form (complex Omega_tilde so the branch
/// 4 Omega^2 < gamma_a1c^2 stays valid). b5 is fixed by the exact initial
/// slope dG_{a2a2,a1a1}/dt(0) = Gamma1.
struct PrintedGreenConstants {
  Complex omega_tilde, a1, a2_plus, a2_minus, a3, a4, b1, b2, b3, b4, b5;
  double gamma_a1c;
};

PrintedGreenConstants printed_green_constants(const RateSet& rates, double rabi);

/// The printed closed form for the {a1, a2} block, entries(final, initial).
/// It factorizes the characteristic polynomial as (s + A1)(s^2 + gamma s + Omega^2),
/// which is exact only without drive; used as a documented reference.
Eigen::Matrix2cd printed_population_green(const RateSet& rates, double rabi, double t);

// --- coherence Green functions --------------------------------------------

struct CoherenceGreenSpec {
  Level ket;
  Level bra;
  bool dressed;

  /// Allowed pairs: (a1|a2, b) on the detection axis, (b, a1|a2) on the
  /// excitation axis. Dressed when one index is a1 and sys.rabi > 0.
  static CoherenceGreenSpec classify(Level ket, Level bra, const LevelSystem& sys);
};

/// Frequency-domain Green function. Detection-axis coherences (ket = a_j)
/// return [(i(w - w0) - M)^-1]_00 with w0 = omega_{a_j b}; excitation-axis
/// coherences (bra = a_i) return the complex conjugate, so both peak at +w0.
/// M = [[-gamma_a1b, i Omega/2], [i Omega/2, -gamma_cb]] for dressed a1, and
/// the scalar -gamma_{a_j b} otherwise.
Complex coherence_green_freq(const CoherenceGreenSpec& spec, const LevelSystem& sys,
                             const RateSet& rates, double omega);

/// 2x2 (or effectively 1x1) rotating-frame generator of a detection-axis
/// coherence; shared with the time-domain oracle.
Eigen::Matrix2cd coherence_generator(const CoherenceGreenSpec& spec, const RateSet& rates,
                                     double rabi);

}  // namespace eit2d
