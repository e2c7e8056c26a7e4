#include "eit2d/oracle.hpp"

#include "eit2d/errors.hpp"
#include "eit2d/scenario.hpp"

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace eit2d {

PopulationGreenMatrix oracle_population_green(const RateSet& rates, double rabi, double t) {
  if (!(t >= 0.0)) throw DomainError("oracle_population_green: negative time");
  rates.validate();
  const Complex h(0.0, 0.5 * rabi);
  const double gamma = rates.gamma_a1c();

  // 0: a1a1, 1: a1c, 2: ca1, 3: cc, 4: a2a2
  Eigen::Matrix<Complex, 5, 5> m = Eigen::Matrix<Complex, 5, 5>::Zero();
  m(0, 0) = -rates.gamma_down;
  m(0, 4) = rates.gamma_up;
  m(0, 2) = h;
  m(0, 1) = -h;
  m(1, 3) = h;
  m(1, 0) = -h;
  m(1, 1) = -gamma;
  m(2, 3) = -h;
  m(2, 0) = h;
  m(2, 2) = -gamma;
  m(3, 1) = h;
  m(3, 2) = -h;
  m(3, 3) = -rates.gamma_c_down;
  m(4, 0) = rates.gamma_down;
  m(4, 4) = -rates.gamma_up;

  Eigen::Matrix<double, 10, 10> split;
  split << m.real(), -m.imag(), m.imag(), m.real();
  const Eigen::Matrix<double, 10, 10> prop = (split * t).exp();

  const std::array<int, 3> idx{0, 4, 3};
  PopulationGreenMatrix g;
  g.t = t;
  for (int f = 0; f < 3; ++f) {
    for (int i = 0; i < 3; ++i) {
      g.entries(f, i) = Complex(prop(idx[f], idx[i]), prop(idx[f] + 5, idx[i]));
    }
  }
  return g;
}

Complex coherence_signal(const CoherenceGreenSpec& spec, const LevelSystem& sys,
                         const RateSet& rates, double t) {
  const Level a = spec.ket == Level::b ? spec.bra : spec.ket;
  const Eigen::Matrix2cd m = coherence_generator(spec, rates, sys.rabi);
  const Complex i(0.0, 1.0);
  Complex s;
  if (spec.dressed) {
    s = (m * t).exp()(0, 0);
  } else {
    s = std::exp(m(0, 0) * t);
  }
  return s * std::exp(i * sys.transition(a, Level::b) * t);
}

double slowest_coherence_rate(const LevelSystem& sys, const RateSet& rates) {
  double slowest = std::numeric_limits<double>::infinity();
  for (Level a : {Level::a1, Level::a2}) {
    const CoherenceGreenSpec spec = CoherenceGreenSpec::classify(a, Level::b, sys);
    if (spec.dressed) {
      const Eigen::Matrix2cd m = coherence_generator(spec, rates, sys.rabi);
      Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(m, false);
      for (int k = 0; k < 2; ++k) slowest = std::min(slowest, -es.eigenvalues()(k).real());
    } else {
      slowest = std::min(slowest, rates.coherence_decay(a, Level::b));
    }
  }
  return slowest;
}

namespace {

using CVec = std::vector<Complex>;

double bin_frequency_step(double t_max) { return 2.0 * std::numbers::pi / t_max; }

// Value of a wrapped spectrum at continuous bin coordinate f.
struct Bin {
  int lo;
  int hi;
  double frac;
};

Bin locate(double f, int n) {
  const double fl = std::floor(f);
  const int k = static_cast<int>(fl);
  auto wrap = [n](int x) { return ((x % n) + n) % n; };
  return {wrap(k), wrap(k + 1), f - fl};
}

}  // namespace

Spectrum2D oracle_spectrum_fft(const LevelSystem& sys, const RateSet& rates, PathwaySelection sel,
                               double t2, const FrequencyGrid& grid, double t_max, int n_t) {
  if (n_t < 1024 || (n_t & (n_t - 1)) != 0) {
    throw DomainError("oracle_spectrum_fft: n_t must be a power of two >= 1024");
  }
  if (!(t_max > 0.0)) throw DomainError("oracle_spectrum_fft: t_max must be positive");
  if (!(t2 >= 0.0)) throw DomainError("oracle_spectrum_fft: negative t2");
  grid.validate();
  sel.validate();
  sys.validate();
  rates.validate();

  const double rate = slowest_coherence_rate(sys, rates);
  if (!(t_max * rate >= 20.0)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "oracle_spectrum_fft: t_max %.6g below 20/%.6g", t_max, rate);
    throw AccuracyError(buf);
  }

  const int n = n_t;
  const double dt = t_max / n;
  const double c1 = 0.5 * (grid.omega1_min + grid.omega1_max);
  const double c3 = 0.5 * (grid.omega3_min + grid.omega3_max);
  const Complex i(0.0, 1.0);

  std::array<CVec, 2> excite, detect;
  const std::array<Level, 2> levels{Level::a1, Level::a2};
  for (int k = 0; k < 2; ++k) {
    const CoherenceGreenSpec spec = CoherenceGreenSpec::classify(levels[k], Level::b, sys);
    excite[k].resize(n);
    detect[k].resize(n);
    for (int s = 0; s < n; ++s) {
      const double t = s * dt;
      const Complex sig = coherence_signal(spec, sys, rates, t);
      const double w = s == 0 ? 0.5 : 1.0;
      detect[k][s] = w * sig * std::exp(-i * c3 * t);
      excite[k][s] = w * std::conj(sig) * std::exp(i * c1 * t);
    }
    const double tail = std::abs(coherence_signal(spec, sys, rates, (n - 1) * dt));
    if (tail > 1e-6 * std::abs(coherence_signal(spec, sys, rates, 0.0))) {
      throw AccuracyError("oracle_spectrum_fft: coherence has not decayed within t_max");
    }
  }

  const std::array<double, 2> mu2{sys.mu_b_a1 * sys.mu_b_a1, sys.mu_b_a2 * sys.mu_b_a2};
  Eigen::Matrix2d pop = Eigen::Matrix2d::Zero();
  if (sel.include_r2) pop = oracle_population_green(rates, sys.rabi, t2).entries.topLeftCorner<2, 2>().real();
  const double bleach = sel.include_r3 ? bleach_survival(rates, t2) : 0.0;
  Eigen::Matrix2d weight;
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) weight(j, k) = mu2[k] * mu2[j] * (pop(j, k) + bleach);
  }

  // The (t1, t3) plane is sum_jk weight(j, k) excite_k(t1) detect_j(t3), so its
  // two-dimensional transform factorizes into one-dimensional transforms.
  Eigen::FFT<double> fft;
  std::array<CVec, 2> ex_f, det_f;
  CVec in(n);
  for (int k = 0; k < 2; ++k) {
    fft.fwd(det_f[k], detect[k]);
    for (int a = 0; a < n; ++a) in[a] = std::conj(excite[k][a]);
    fft.fwd(ex_f[k], in);
    for (int a = 0; a < n; ++a) {
      ex_f[k][a] = std::conj(ex_f[k][a]) * dt;
      det_f[k][a] *= dt;
    }
  }
  auto plane = [&](int a, int b) {
    Complex v = 0.0;
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) v += weight(j, k) * ex_f[k][a] * det_f[j][b];
    }
    return v.real();
  };

  const double dw = bin_frequency_step(t_max);
  Spectrum2D result;
  result.grid = grid;
  result.values.resize(grid.n1, grid.n3);
  for (int p = 0; p < grid.n1; ++p) {
    const Bin x = locate((grid.omega1(p) - c1) / dw, n);
    for (int q = 0; q < grid.n3; ++q) {
      const Bin y = locate((grid.omega3(q) - c3) / dw, n);
      const double v00 = plane(x.lo, y.lo);
      const double v01 = plane(x.lo, y.hi);
      const double v10 = plane(x.hi, y.lo);
      const double v11 = plane(x.hi, y.hi);
      result.values(p, q) = (1 - x.frac) * ((1 - y.frac) * v00 + y.frac * v01) +
                            x.frac * ((1 - y.frac) * v10 + y.frac * v11);
    }
  }
  result.meta.parameter_hash = parameter_hash(sys, rates, sel, t2, grid);
  result.meta.include_r2 = sel.include_r2;
  result.meta.include_r3 = sel.include_r3;
  result.meta.t2 = t2;
  result.meta.rabi = sys.rabi;
  return result;
}

// --- verification ------------------------------------------------------------

std::vector<GreenSweepPoint> default_green_sweep() {
  std::vector<GreenSweepPoint> sweep;
  for (double rabi : {0.0, 0.5, 2.0, 9.0}) {
    for (double g2 : {0.0, 0.1, 0.9646, 1.0}) {
      for (double deph : {0.0, 10.0}) {
        for (double t : {0.1, 0.5, 1.0, 3.0, 5.0}) sweep.push_back({rabi, g2, deph, t});
      }
    }
  }
  return sweep;
}

OracleReport verify_green(double tolerance) {
  return verify_green(tolerance, default_green_sweep());
}

OracleReport verify_green(double tolerance, const std::vector<GreenSweepPoint>& sweep,
                          const GreenEvaluator& evaluator) {
  if (sweep.empty()) throw DomainError("verify_green: empty sweep");
  OracleReport report;
  report.tolerance = tolerance;
  for (const auto& pt : sweep) {
    RateSet rates;
    rates.gamma_down = 1.0;
    rates.gamma_up = pt.gamma_up;
    rates.deph_a1c = pt.deph_a1c;
    const PopulationGreenMatrix a = evaluator(rates, pt.rabi, pt.t);
    const PopulationGreenMatrix o = oracle_population_green(rates, pt.rabi, pt.t);
    for (int f = 0; f < 3; ++f) {
      for (int k = 0; k < 3; ++k) {
        const double err =
            std::abs(a.entries(f, k) - o.entries(f, k)) / std::max(std::abs(o.entries(f, k)), 1e-6);
        if (!(err <= report.max_rel_err)) {
          report.max_rel_err = std::isnan(err) ? std::numeric_limits<double>::infinity() : err;
          char buf[160];
          std::snprintf(buf, sizeof buf,
                        "rabi=%g gamma2=%g deph_a1c=%g t=%g entry=(%d,%d)", pt.rabi, pt.gamma_up,
                        pt.deph_a1c, pt.t, f, k);
          report.worst_case = buf;
        }
      }
    }
    ++report.cases;
  }
  report.passed = report.max_rel_err <= tolerance;
  return report;
}

SpectrumComparison compare_with_oracle(const SpectrumCase& c, double t_max, int n_t,
                                       unsigned threads) {
  const Spectrum2D analytic = normalize(compute_spectrum(c.sys, c.rates, c.sel, c.t2, c.grid, threads));
  const Spectrum2D oracle = normalize(oracle_spectrum_fft(c.sys, c.rates, c.sel, c.t2, c.grid, t_max, n_t));
  const auto pa = find_peaks(analytic);
  const auto po = find_peaks(oracle);

  SpectrumComparison cmp;
  cmp.name = c.name;
  cmp.peaks_analytic = pa.size();
  cmp.peaks_oracle = po.size();
  if (pa.size() != po.size() || pa.empty()) {
    cmp.max_position_cells = cmp.max_value_rel_err = std::numeric_limits<double>::infinity();
    return cmp;
  }
  for (const Peak& x : pa) {
    double best = std::numeric_limits<double>::infinity();
    const Peak* match = nullptr;
    for (const Peak& y : po) {
      const double d = std::max(std::abs(x.p - y.p), std::abs(x.q - y.q));
      if (d < best) {
        best = d;
        match = &y;
      }
    }
    cmp.max_position_cells = std::max(cmp.max_position_cells, best);
    cmp.max_value_rel_err =
        std::max(cmp.max_value_rel_err, std::abs(match->value - x.value) / std::abs(x.value));
  }
  return cmp;
}

OracleReport verify_spectrum(double tolerance) {
  std::vector<SpectrumCase> cases;
  for (const char* name : {"fig2b", "fig2d"}) cases.push_back(spectrum_case(preset(name)));
  return verify_spectrum(tolerance, cases);
}

OracleReport verify_spectrum(double tolerance, const std::vector<SpectrumCase>& cases,
                             unsigned threads) {
  if (cases.empty()) throw DomainError("verify_spectrum: no cases");
  OracleReport report;
  report.tolerance = tolerance;
  for (const auto& c : cases) {
    const double t_max = std::max(40.0, 25.0 / slowest_coherence_rate(c.sys, c.rates));
    const SpectrumComparison cmp = compare_with_oracle(c, t_max, 2048, threads);
    double err = cmp.max_value_rel_err;
    if (cmp.max_position_cells > 1.0) err = std::numeric_limits<double>::infinity();
    if (!(err <= report.max_rel_err)) {
      report.max_rel_err = err;
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s peaks=%zu/%zu position_cells=%g", c.name.c_str(),
                    cmp.peaks_analytic, cmp.peaks_oracle, cmp.max_position_cells);
      report.worst_case = buf;
    }
    ++report.cases;
  }
  report.passed = report.max_rel_err <= tolerance;
  return report;
}

}  // namespace eit2d
