#include "eit2d/pathways.hpp"

#include "eit2d/errors.hpp"

#include <cmath>

namespace eit2d {

void PathwaySelection::validate() const {
  if (!include_r2 && !include_r3) throw DomainError("PathwaySelection: no pathway selected");
}

double bleach_survival(const RateSet& rates, double t2) {
  if (!(t2 >= 0.0)) throw DomainError("bleach_survival: negative t2");
  const double down = rates.gamma_b_down;
  const double up = rates.gamma_b_up;
  const double total = down + up;
  if (total == 0.0) return 1.0;
  return (up + down * std::exp(-total * t2)) / total;
}

ResponseKernel::ResponseKernel(const LevelSystem& sys, const RateSet& rates,
                               PathwaySelection sel, double t2)
    : sys_(sys), rates_(rates) {
  if (!(t2 >= 0.0)) throw DomainError("response: negative t2");
  sel.validate();
  sys.validate();
  rates.validate();

  const std::array<Level, 2> a{Level::a1, Level::a2};
  for (int k = 0; k < 2; ++k) {
    excite_[k] = CoherenceGreenSpec::classify(Level::b, a[k], sys);
    detect_[k] = CoherenceGreenSpec::classify(a[k], Level::b, sys);
  }

  const std::array<double, 2> mu2{sys.mu_b_a1 * sys.mu_b_a1, sys.mu_b_a2 * sys.mu_b_a2};
  Eigen::Matrix2d pop = Eigen::Matrix2d::Zero();
  if (sel.include_r2) {
    const PopulationGreenMatrix g = population_green_analytic(rates, sys.rabi, t2);
    pop = g.entries.topLeftCorner<2, 2>().real();
  }
  const double bleach = sel.include_r3 ? bleach_survival(rates, t2) : 0.0;
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 2; ++i) weights_(j, i) = mu2[i] * mu2[j] * (pop(j, i) + bleach);
  }
}

AxisFactors ResponseKernel::excitation(double omega1) const {
  return {coherence_green_freq(excite_[0], sys_, rates_, omega1),
          coherence_green_freq(excite_[1], sys_, rates_, omega1)};
}

AxisFactors ResponseKernel::detection(double omega3) const {
  return {coherence_green_freq(detect_[0], sys_, rates_, omega3),
          coherence_green_freq(detect_[1], sys_, rates_, omega3)};
}

double ResponseKernel::combine(const AxisFactors& g1, const AxisFactors& g3) const {
  double s = 0.0;
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 2; ++i) s += weights_(j, i) * (g3[j] * g1[i]).real();
  }
  return s;
}

double response_r2(const LevelSystem& sys, const RateSet& rates, double omega1, double t2,
                   double omega3) {
  return ResponseKernel(sys, rates, PathwaySelection::r2_only(), t2)(omega1, omega3);
}

double response_r3(const LevelSystem& sys, const RateSet& rates, double omega1, double t2,
                   double omega3) {
  return ResponseKernel(sys, rates, PathwaySelection::r3_only(), t2)(omega1, omega3);
}

double response_rephasing(const LevelSystem& sys, const RateSet& rates, PathwaySelection sel,
                          double omega1, double t2, double omega3) {
  sel.validate();
  double s = 0.0;
  if (sel.include_r2) s += response_r2(sys, rates, omega1, t2, omega3);
  if (sel.include_r3) s += response_r3(sys, rates, omega1, t2, omega3);
  return s;
}

}  // namespace eit2d
