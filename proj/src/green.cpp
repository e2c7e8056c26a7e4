#include "eit2d/green.hpp"

#include "eit2d/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <string>

namespace eit2d {

Eigen::Matrix4d population_generator(const RateSet& rates, double rabi) {
  rates.validate();
  if (!(rabi >= 0.0)) throw DomainError("population_generator: negative Rabi frequency");
  const double g1 = rates.gamma_down;
  const double g2 = rates.gamma_up;
  const double gc = rates.gamma_c_down;
  const double gamma = rates.gamma_a1c();
  const double h = 0.5 * rabi;
  Eigen::Matrix4d a;
  // clang-format off
  a << -g1,   g2,   0.0, -h,
        g1,  -g2,   0.0,  0.0,
        0.0,  0.0, -gc,   h,
        rabi, 0.0, -rabi, -gamma;
  // clang-format on
  return a;
}

PopulationModes::PopulationModes(const RateSet& rates, double rabi)
    : generator_(population_generator(rates, rabi)) {
  Eigen::EigenSolver<Eigen::Matrix4d> es(generator_);
  if (es.info() != Eigen::Success) {
    diagonalizable_ = false;
    return;
  }
  lambda_ = es.eigenvalues();
  const Eigen::Matrix4cd v = es.eigenvectors();
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(v);
  const auto& s = svd.singularValues();
  if (!(s(3) > 0.0) || s(0) / s(3) > 1e8) {
    diagonalizable_ = false;
    return;
  }
  const Eigen::Matrix4cd w = v.inverse();
  for (int k = 0; k < 4; ++k) projectors_[k] = v.col(k) * w.row(k);

  const double scale = std::max(1.0, generator_.cwiseAbs().maxCoeff());
  const double a1 = rates.gamma_down + rates.gamma_up;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 4; ++k) {
    const Complex l = lambda_(k);
    if (std::abs(l.imag()) > 1e-9 * scale || std::abs(l) <= 1e-12 * scale) continue;
    const double d = std::abs(l.real() + a1);
    if (d < best) {
      best = d;
      slow_ = k;
    }
  }
}

PopulationGreenMatrix PopulationModes::at(double t) const {
  if (!(t >= 0.0)) throw DomainError("population Green function: negative time");
  PopulationGreenMatrix g;
  g.t = t;
  if (t == 0.0 && !flip_slow_) return g;

  Eigen::Matrix4cd full;
  if (diagonalizable_) {
    full.setZero();
    for (int k = 0; k < 4; ++k) {
      const double sign = (flip_slow_ && k == slow_) ? -1.0 : 1.0;
      full += sign * std::exp(lambda_(k) * t) * projectors_[k];
    }
  } else {
    full = (generator_ * t).exp().cast<Complex>();
  }
  g.entries = full.topLeftCorner<3, 3>();
  return g;
}

PopulationGreenMatrix population_green_analytic(const RateSet& rates, double rabi, double t) {
  return PopulationModes(rates, rabi).at(t);
}

PrintedGreenConstants printed_green_constants(const RateSet& rates, double rabi) {
  const Complex i(0.0, 1.0);
  const double g1 = rates.gamma_down;
  const double g2 = rates.gamma_up;
  const double gamma = rates.gamma_a1c();
  const double om2 = rabi * rabi;

  PrintedGreenConstants c{};
  c.gamma_a1c = gamma;
  c.omega_tilde = std::sqrt(Complex(4.0 * om2 - gamma * gamma, 0.0));
  c.a1 = g1 + g2;
  const Complex a1 = c.a1;
  const Complex ot = c.omega_tilde;
  const Complex base = g2 * (a1 - gamma) + om2;
  c.a2_plus = base * (i * ot + gamma) - 2.0 * g1 * om2;
  c.a2_minus = base * (i * ot - gamma) + 2.0 * g1 * om2;
  c.a3 = -a1 * (a1 - gamma) - om2;
  c.a4 = 2.0 * c.a3 + om2;
  c.b1 = -2.0 * a1 * (a1 - gamma) - om2;
  c.b2 = (c.b1 - om2) / 2.0;
  c.b3 = (a1 - gamma) * (gamma + i * ot) + 2.0 * om2;
  c.b4 = (a1 - gamma) * (-gamma + i * ot) - 2.0 * om2;
  // d/dt of the bracket at t = 0, divided so that the entry's slope is Gamma1.
  const Complex slope = -2.0 * i * ot * c.b1 * a1 +
                        a1 * c.b3 * ((-gamma + i * ot) / 2.0 + c.b4 * (-gamma - i * ot) / 2.0);
  c.b5 = slope / (4.0 * i * ot * a1);
  return c;
}

Eigen::Matrix2cd printed_population_green(const RateSet& rates, double rabi, double t) {
  if (!(t >= 0.0)) throw DomainError("printed_population_green: negative time");
  const PrintedGreenConstants c = printed_green_constants(rates, rabi);
  const Complex i(0.0, 1.0);
  const double g1 = rates.gamma_down;
  const double g2 = rates.gamma_up;
  const Complex ot = c.omega_tilde;
  const Complex damp = std::exp(-c.gamma_a1c * t / 2.0);
  const Complex ep = std::exp(i * ot * t / 2.0);
  const Complex em = std::exp(-i * ot * t / 2.0);
  const Complex ea = std::exp(-c.a1 * t);

  Eigen::Matrix2cd g;
  g(0, 0) = -1.0 / (4.0 * i * c.a1 * c.a3 * ot) *
            (c.a1 * damp * (c.a2_plus * ep + c.a2_minus * em) -
             2.0 * i * ot * (g2 * c.a3 + g1 * c.a4 * ea));
  g(1, 0) = g1 / (4.0 * i * ot * c.a1 * c.b5) *
            (2.0 * i * ot * c.b1 * (ea - c.b2) + c.a1 * c.b3 * damp * (ep + c.b4 * em));
  g(0, 1) = -g2 / c.a1 * (-1.0 + ea);
  g(1, 1) = (g1 + g2 * ea) / c.a1;
  return g;
}

// --- coherence Green functions --------------------------------------------

CoherenceGreenSpec CoherenceGreenSpec::classify(Level ket, Level bra, const LevelSystem& sys) {
  const bool detect = (ket == Level::a1 || ket == Level::a2) && bra == Level::b;
  const bool excite = ket == Level::b && (bra == Level::a1 || bra == Level::a2);
  if (!detect && !excite) {
    throw DomainError("coherence Green function: unsupported transition pair " +
                      std::string(name(ket)) + std::string(name(bra)));
  }
  const bool has_a1 = ket == Level::a1 || bra == Level::a1;
  return {ket, bra, has_a1 && sys.rabi > 0.0};
}

namespace {

Level optical_level(const CoherenceGreenSpec& spec) {
  return spec.ket == Level::b ? spec.bra : spec.ket;
}

}  // namespace

Eigen::Matrix2cd coherence_generator(const CoherenceGreenSpec& spec, const RateSet& rates,
                                     double rabi) {
  const Complex i(0.0, 1.0);
  const Level a = optical_level(spec);
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = -rates.coherence_decay(a, Level::b);
  m(1, 1) = -rates.coherence_decay(Level::c, Level::b);
  if (spec.dressed) {
    m(0, 1) = i * rabi / 2.0;
    m(1, 0) = i * rabi / 2.0;
  }
  return m;
}

Complex coherence_green_freq(const CoherenceGreenSpec& spec, const LevelSystem& sys,
                             const RateSet& rates, double omega) {
  const Complex i(0.0, 1.0);
  const Level a = optical_level(spec);
  const double delta = omega - sys.transition(a, Level::b);
  Complex g;
  if (spec.dressed) {
    if (!sys.is_resonant()) {
      throw ConfigurationError("dressed coherence Green function requires a resonant drive");
    }
    const Eigen::Matrix2cd m = coherence_generator(spec, rates, sys.rabi);
    const Complex d00 = i * delta - m(0, 0);
    const Complex d11 = i * delta - m(1, 1);
    g = d11 / (d00 * d11 - m(0, 1) * m(1, 0));
  } else {
    g = 1.0 / (rates.coherence_decay(a, Level::b) + i * delta);
  }
  return spec.ket == Level::b ? std::conj(g) : g;
}

}  // namespace eit2d
