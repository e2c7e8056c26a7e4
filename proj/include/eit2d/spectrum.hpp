#pragma once

#include "eit2d/core.hpp"
#include "eit2d/pathways.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace eit2d {

struct FrequencyGrid {
  double omega1_min = 0.0;
  double omega1_max = 1.0;
  int n1 = 256;
  double omega3_min = 0.0;
  double omega3_max = 1.0;
  int n3 = 256;

  double step1() const { return (omega1_max - omega1_min) / (n1 - 1); }
  double step3() const { return (omega3_max - omega3_min) / (n3 - 1); }
  double omega1(int p) const { return omega1_min + p * step1(); }
  double omega3(int q) const { return omega3_min + q * step3(); }

  /// Square grid over [lo, hi] on both axes.
  static FrequencyGrid square(double lo, double hi, int n);

  void validate() const;
};

struct SpectrumMeta {
  std::uint64_t parameter_hash = 0;
  bool include_r2 = true;
  bool include_r3 = false;
  double sigma = 0.0;
  int n_nodes = 1;
  bool normalized = false;
  double t2 = 0.0;
  double temperature = 0.0;
  double rabi = 0.0;
};

struct Spectrum2D {
  FrequencyGrid grid;
  Eigen::MatrixXd values;  // (n1, n3), row index along omega1
  SpectrumMeta meta;
};

enum class DisorderShift {
  a2_only,    // omega_a2 moves, a1 and the drive resonance stay fixed
  symmetric,  // a1 and c up by delta/2, a2 down by delta/2
};

struct DisorderModel {
  double sigma = 0.0;
  int n_nodes = 21;
  DisorderShift shift = DisorderShift::a2_only;

  void validate() const;
};

/// Probabilists' Gauss-Hermite rule (weight exp(-x^2/2)), weights summing to 1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_hermite(int n);

/// FNV-1a 64-bit.
std::uint64_t fnv1a64(std::string_view bytes);

std::uint64_t parameter_hash(const LevelSystem& sys, const RateSet& rates, PathwaySelection sel,
                             double t2, const FrequencyGrid& grid);

/// threads: 0 = hardware concurrency.
Spectrum2D compute_spectrum(const LevelSystem& sys, const RateSet& rates, PathwaySelection sel,
                            double t2, const FrequencyGrid& grid, unsigned threads = 1);

/// Level system of one disorder node: the a1-a2 spacing grows by delta.
LevelSystem shifted_system(const LevelSystem& sys, double delta,
                           DisorderShift shift = DisorderShift::a2_only);

/// Quadrature average over a Gaussian a1-a2 spacing fluctuation. Rates are
/// regenerated from `bath` at every node so detailed balance follows the
/// node's spacing.
Spectrum2D disorder_average(const LevelSystem& sys, const BathSpec& bath, PathwaySelection sel,
                            double t2, const FrequencyGrid& grid, const DisorderModel& dis,
                            unsigned threads = 1);

Spectrum2D normalize(const Spectrum2D& spec);

struct Peak {
  double omega1;
  double omega3;
  double value;
  int p;
  int q;
};

/// Strict maxima over full 8-neighbourhoods above min_prominence * max,
/// sorted by value (descending), ties by (omega1, omega3) ascending.
std::vector<Peak> find_peaks(const Spectrum2D& spec, double min_prominence = 0.2);

/// Sub-cell peak position from a parabola through the neighbours on each axis.
Peak refine_peak(const Spectrum2D& spec, const Peak& peak);

/// Largest ratio, over pairs of adjacent peaks, of the minimum along the
/// straight segment joining them to the smaller of the two peak values.
/// Pairs separated by more than `diagonal_offset` on both axes are diagonal
/// neighbours and skipped. Returns 1 unless exactly four peaks are found.
double saddle_ratio(const Spectrum2D& spec, double diagonal_offset,
                    double min_prominence = 0.2);

void write_spectrum(const Spectrum2D& spec, const std::filesystem::path& path);
Spectrum2D read_spectrum(const std::filesystem::path& path);

/// Writes `content` to a sibling temporary and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace eit2d
