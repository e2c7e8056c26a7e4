#pragma once

// Rephasing third-order response assembled from Green-function factors:
//
//   R2 = Re sum_ij |mu_b,ai|^2 |mu_aj,b|^2 G_ajb(w3) G_ajaj,aiai(t2) G_bai(w1)
//   R3 = Re sum_ij |mu_b,ai|^2 |mu_aj,b|^2 G_ajb(w3) G_bb,bb(t2)     G_bai(w1)
//
// with i, j over {a1, a2}.

#include "eit2d/core.hpp"
#include "eit2d/green.hpp"

#include <array>

namespace eit2d {

struct PathwaySelection {
  bool include_r2 = true;
  bool include_r3 = false;

  static PathwaySelection r2_only() { return {true, false}; }
  static PathwaySelection r3_only() { return {false, true}; }
  static PathwaySelection both() { return {true, true}; }

  void validate() const;
};

/// b-population survival under b <-> g kinetics.
double bleach_survival(const RateSet& rates, double t2);

/// Green-function factors along one frequency axis, indexed {a1, a2}.
using AxisFactors = std::array<Complex, 2>;

/// Precomputes everything that does not depend on (w1, w3); cheap to call
/// per grid point afterwards.
class ResponseKernel {
 public:
  ResponseKernel(const LevelSystem& sys, const RateSet& rates, PathwaySelection sel, double t2);

  AxisFactors excitation(double omega1) const;
  AxisFactors detection(double omega3) const;
  double combine(const AxisFactors& g1, const AxisFactors& g3) const;
  double operator()(double omega1, double omega3) const {
    return combine(excitation(omega1), detection(omega3));
  }

  /// Effective t2 weight of the (i -> j) term, population plus bleach parts,
  /// already multiplied by the dipole factors.
  const Eigen::Matrix2d& weights() const { return weights_; }

 private:
  LevelSystem sys_;
  RateSet rates_;
  std::array<CoherenceGreenSpec, 2> excite_;
  std::array<CoherenceGreenSpec, 2> detect_;
  Eigen::Matrix2d weights_;  // weights_(j, i)
};

double response_r2(const LevelSystem& sys, const RateSet& rates, double omega1, double t2,
                   double omega3);
double response_r3(const LevelSystem& sys, const RateSet& rates, double omega1, double t2,
                   double omega3);
double response_rephasing(const LevelSystem& sys, const RateSet& rates, PathwaySelection sel,
                          double omega1, double t2, double omega3);

}  // namespace eit2d
