#pragma once

// Brute-force references: dense propagation of the driven population block
// and a time-domain response transformed to frequency by FFT.

#include "eit2d/core.hpp"
#include "eit2d/green.hpp"
#include "eit2d/pathways.hpp"
#include "eit2d/spectrum.hpp"

#include <functional>
#include <string>
#include <vector>

namespace eit2d {

/// Propagates {rho_a1a1, rho_a1c, rho_ca1, rho_cc, rho_a2a2} by the matrix
/// exponential of the real/imaginary split 10x10 generator.
PopulationGreenMatrix oracle_population_green(const RateSet& rates, double rabi, double t);

/// Detection-axis coherence signal [exp(M t)]_00 * exp(i w0 t).
Complex coherence_signal(const CoherenceGreenSpec& spec, const LevelSystem& sys,
                         const RateSet& rates, double t);

/// Slowest decay rate among the coherence propagators entering the response.
double slowest_coherence_rate(const LevelSystem& sys, const RateSet& rates);

/// n_t: power of two >= 1024. Samples t = n * t_max / n_t, n < n_t.
Spectrum2D oracle_spectrum_fft(const LevelSystem& sys, const RateSet& rates, PathwaySelection sel,
                               double t2, const FrequencyGrid& grid, double t_max, int n_t);

struct OracleReport {
  double max_rel_err = 0.0;
  std::string worst_case;
  double tolerance = 0.0;
  std::size_t cases = 0;
  bool passed = false;
};

struct GreenSweepPoint {
  double rabi;
  double gamma_up;
  double deph_a1c;
  double t;
};

/// Omega x Gamma2 x dephasing x t, 160 points.
std::vector<GreenSweepPoint> default_green_sweep();

using GreenEvaluator = std::function<PopulationGreenMatrix(const RateSet&, double, double)>;

/// Relative error |a - o| / max(|o|, 1e-6) over all nine entries.
OracleReport verify_green(double tolerance);
OracleReport verify_green(double tolerance, const std::vector<GreenSweepPoint>& sweep,
                          const GreenEvaluator& evaluator = population_green_analytic);

struct SpectrumCase {
  std::string name;
  LevelSystem sys;
  RateSet rates;
  PathwaySelection sel;
  double t2;
  FrequencyGrid grid;
};

struct SpectrumComparison {
  std::string name;
  std::size_t peaks_analytic = 0;
  std::size_t peaks_oracle = 0;
  double max_position_cells = 0.0;
  double max_value_rel_err = 0.0;
};

/// Compares normalized spectra: peak sets (prominence 0.2) must pair up within
/// one grid cell; value error is relative to the analytic peak height. A
/// missing or displaced peak counts as infinite error.
SpectrumComparison compare_with_oracle(const SpectrumCase& c, double t_max, int n_t,
                                       unsigned threads = 1);

OracleReport verify_spectrum(double tolerance);
OracleReport verify_spectrum(double tolerance, const std::vector<SpectrumCase>& cases,
                             unsigned threads = 1);

}  // namespace eit2d
