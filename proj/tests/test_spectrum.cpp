#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "eit2d/errors.hpp"
#include "eit2d/scenario.hpp"
#include "eit2d/spectrum.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

using namespace eit2d;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("eit2d_spectrum_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Spectrum2D lorentzian_product(const FrequencyGrid& grid, double c1, double c3, double gamma) {
  Spectrum2D s;
  s.grid = grid;
  s.values.resize(grid.n1, grid.n3);
  for (int p = 0; p < grid.n1; ++p) {
    for (int q = 0; q < grid.n3; ++q) {
      const double x = grid.omega1(p) - c1;
      const double y = grid.omega3(q) - c3;
      s.values(p, q) = gamma * gamma / ((gamma * gamma + x * x) * (gamma * gamma + y * y));
    }
  }
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("grid and disorder validation") {
  CHECK_THROWS_AS(FrequencyGrid::square(0.0, 1.0, 1).validate(), DomainError);
  CHECK_THROWS_AS(FrequencyGrid::square(1.0, 1.0, 8).validate(), DomainError);
  CHECK_NOTHROW(FrequencyGrid::square(0.0, 1.0, 2).validate());
  const FrequencyGrid g = FrequencyGrid::square(-2.0, 2.0, 5);
  CHECK(g.step1() == 1.0);
  CHECK(g.omega3(4) == 2.0);
  CHECK_THROWS_AS((DisorderModel{1.0, 4}.validate()), DomainError);
  CHECK_THROWS_AS((DisorderModel{-0.1, 5}.validate()), DomainError);
  CHECK_NOTHROW((DisorderModel{0.0, 1}.validate()));
}

TEST_CASE("Gauss-Hermite rule") {
  for (int n : {1, 5, 21}) {
    const QuadratureRule r = gauss_hermite(n);
    double w = 0.0, m2 = 0.0, m4 = 0.0, m1 = 0.0;
    for (int k = 0; k < n; ++k) {
      w += r.weights[k];
      m1 += r.weights[k] * r.nodes[k];
      m2 += r.weights[k] * r.nodes[k] * r.nodes[k];
      m4 += r.weights[k] * std::pow(r.nodes[k], 4);
      CHECK(r.nodes[k] == -r.nodes[n - 1 - k]);
      CHECK(r.weights[k] == r.weights[n - 1 - k]);
    }
    CHECK(w == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(m1) < 1e-14);
    if (n >= 3) {
      CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
    }
    CHECK(r.nodes[n / 2] == 0.0);
  }
  CHECK_THROWS_AS(gauss_hermite(0), DomainError);
}

TEST_CASE("compute_spectrum") {
  const ScenarioConfig cfg = preset("fig2d");

  SUBCASE("agrees with pointwise responses") {
    const Spectrum2D s = compute_spectrum(cfg.system, cfg.rates(), cfg.pathways, cfg.t2, cfg.grid);
    for (int p : {0, 77, 255}) {
      for (int q : {3, 128, 200}) {
        CHECK(s.values(p, q) == doctest::Approx(response_rephasing(cfg.system, cfg.rates(), cfg.pathways,
                                                                   cfg.grid.omega1(p), cfg.t2,
                                                                   cfg.grid.omega3(q)))
                                    .epsilon(1e-12));
      }
    }
    CHECK(s.values.allFinite());
    CHECK(s.meta.rabi == 9.0);
  }

  SUBCASE("deterministic across runs and thread counts") {
    const Spectrum2D a = compute_spectrum(cfg.system, cfg.rates(), cfg.pathways, cfg.t2, cfg.grid, 1);
    const Spectrum2D b = compute_spectrum(cfg.system, cfg.rates(), cfg.pathways, cfg.t2, cfg.grid, 1);
    const Spectrum2D c = compute_spectrum(cfg.system, cfg.rates(), cfg.pathways, cfg.t2, cfg.grid, 4);
    CHECK(a.values == b.values);
    CHECK(a.values == c.values);
    CHECK(a.meta.parameter_hash == c.meta.parameter_hash);
  }

  SUBCASE("parameter hash tracks inputs") {
    const std::uint64_t h = parameter_hash(cfg.system, cfg.rates(), cfg.pathways, cfg.t2, cfg.grid);
    CHECK(h == parameter_hash(cfg.system, cfg.rates(), cfg.pathways, cfg.t2, cfg.grid));
    CHECK(h != parameter_hash(cfg.system, cfg.rates(), cfg.pathways, cfg.t2 + 1e-9, cfg.grid));
    CHECK(h != parameter_hash(cfg.system, cfg.rates(), PathwaySelection::both(), cfg.t2, cfg.grid));
  }
}

TEST_CASE("disorder averaging") {
  const ScenarioConfig cfg = preset("fig2d");
  FrequencyGrid grid = cfg.grid;
  grid.n1 = grid.n3 = 64;

  SUBCASE("zero width equals the bare spectrum") {
    const Spectrum2D bare = compute_spectrum(cfg.system, cfg.rates(), cfg.pathways, cfg.t2, grid);
    const Spectrum2D avg = disorder_average(cfg.system, cfg.bath, cfg.pathways, cfg.t2, grid, {0.0, 21});
    CHECK((bare.values - avg.values).cwiseAbs().maxCoeff() <= 1e-12);
  }

  for (DisorderShift shift : {DisorderShift::a2_only, DisorderShift::symmetric}) {
    const DisorderModel dis{1.5, 7, shift};
    const Spectrum2D avg = disorder_average(cfg.system, cfg.bath, cfg.pathways, cfg.t2, grid, dis);
    CHECK(avg.meta.sigma == 1.5);
    CHECK(avg.meta.n_nodes == 7);
    const QuadratureRule rule = gauss_hermite(7);
    Eigen::MatrixXd lo = Eigen::MatrixXd::Constant(grid.n1, grid.n3, 1e300);
    Eigen::MatrixXd hi = -lo;
    for (double x : rule.nodes) {
      const LevelSystem node = shifted_system(cfg.system, 1.5 * x, shift);
      const Spectrum2D s = compute_spectrum(node, thermal_rates(node, cfg.bath), cfg.pathways, cfg.t2, grid);
      lo = lo.cwiseMin(s.values);
      hi = hi.cwiseMax(s.values);
    }
    CHECK(((avg.values - lo).array() >= -1e-12).all());
    CHECK(((hi - avg.values).array() >= -1e-12).all());

    const Spectrum2D again = disorder_average(cfg.system, cfg.bath, cfg.pathways, cfg.t2, grid, dis, 3);
    CHECK(again.values == avg.values);
  }
}

TEST_CASE("shifted systems") {
  const LevelSystem sys = preset_levels(0.18, 9.0);
  const LevelSystem a2 = shifted_system(sys, 0.5);
  CHECK(a2.gap() == doctest::Approx(0.68));
  CHECK(a2.omega_a1 == sys.omega_a1);
  CHECK(a2.is_resonant());
  const LevelSystem sym = shifted_system(sys, 0.5, DisorderShift::symmetric);
  CHECK(sym.gap() == doctest::Approx(0.68));
  CHECK(sym.omega_a1 == doctest::Approx(sys.omega_a1 + 0.25));
  CHECK(sym.is_resonant());
}

TEST_CASE("normalization") {
  Spectrum2D s;
  s.grid = FrequencyGrid::square(0.0, 1.0, 3);
  s.values = Eigen::MatrixXd::Zero(3, 3);
  CHECK_THROWS_AS(normalize(s), DomainError);
  s.values(1, 2) = 4.0;
  s.values(0, 0) = -1.0;
  const Spectrum2D n = normalize(s);
  CHECK(n.values.cwiseAbs().maxCoeff() == 1.0);
  CHECK(n.meta.normalized);
  Eigen::Index r = 0, c = 0;
  n.values.maxCoeff(&r, &c);
  CHECK(r == 1);
  CHECK(c == 2);
  const Spectrum2D twice = normalize(n);
  CHECK((twice.values - n.values).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("peak finding") {
  const FrequencyGrid grid = FrequencyGrid::square(-10.0, 10.0, 41);

  SUBCASE("single Lorentzian product") {
    const Spectrum2D s = normalize(lorentzian_product(grid, 2.0, -3.0, 1.0));
    const auto peaks = find_peaks(s);
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0].omega1 == doctest::Approx(2.0));
    CHECK(peaks[0].omega3 == doctest::Approx(-3.0));
    CHECK(peaks[0].value == doctest::Approx(1.0));
  }

  SUBCASE("ordering and prominence monotonicity") {
    Spectrum2D s = lorentzian_product(grid, -5.0, -5.0, 0.8);
    s.values += 0.6 * lorentzian_product(grid, 5.0, 5.0, 0.8).values;
    s.values += 0.3 * lorentzian_product(grid, -5.0, 5.0, 0.8).values;
    s.values += 0.1 * lorentzian_product(grid, 5.0, -5.0, 0.8).values;
    s = normalize(s);
    const auto all = find_peaks(s, 0.05);
    REQUIRE(all.size() == 4);
    for (std::size_t k = 1; k < all.size(); ++k) CHECK(all[k - 1].value >= all[k].value);
    std::size_t last = all.size();
    for (double prom : {0.05, 0.15, 0.35, 0.7, 0.99}) {
      const std::size_t n = find_peaks(s, prom).size();
      CHECK(n <= last);
      last = n;
    }
    CHECK(find_peaks(s, 0.2).size() == 3);
    CHECK_THROWS_AS(find_peaks(s, 0.0), DomainError);
    CHECK_THROWS_AS(find_peaks(s, 1.0), DomainError);
  }

  SUBCASE("ties break by position") {
    Spectrum2D s = lorentzian_product(grid, 4.0, 0.0, 0.5);
    s.values += lorentzian_product(grid, -4.0, 0.0, 0.5).values;
    const auto peaks = find_peaks(normalize(s));
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0].omega1 < peaks[1].omega1);
  }

  SUBCASE("sub-cell refinement is stable under grid doubling") {
    const double c1 = 1.37, c3 = -2.61;
    const FrequencyGrid fine = FrequencyGrid::square(-10.0, 10.0, 81);
    const Spectrum2D coarse = normalize(lorentzian_product(grid, c1, c3, 1.5));
    const Spectrum2D dense = normalize(lorentzian_product(fine, c1, c3, 1.5));
    const Peak a = refine_peak(coarse, find_peaks(coarse).front());
    const Peak b = refine_peak(dense, find_peaks(dense).front());
    CHECK(std::abs(a.omega1 - b.omega1) < grid.step1());
    CHECK(std::abs(a.omega3 - b.omega3) < grid.step3());
    CHECK(std::abs(b.omega1 - c1) < fine.step1() / 2.0);
  }
}

TEST_CASE("preset peak topology") {
  CHECK(find_peaks(execute_scenario(preset("fig2a")).spectrum).size() == 1);
  CHECK(find_peaks(execute_scenario(preset("fig2d")).spectrum).size() == 4);
  CHECK(saddle_ratio(execute_scenario(preset("fig2a")).spectrum, 4.5) == 1.0);
  const double r = saddle_ratio(execute_scenario(preset("fig2d")).spectrum, 4.5);
  CHECK(r > 0.0);
  CHECK(r < 1.0);
}

TEST_CASE("spectrum files") {
  const fs::path dir = scratch_dir("files");

  SUBCASE("round trip is bit exact") {
    Spectrum2D s = execute_scenario(preset("fig2c")).spectrum;
    s.values(0, 0) = std::numeric_limits<double>::denorm_min();
    s.values(0, 1) = -0.0;
    s.meta.sigma = 2.6;
    s.meta.n_nodes = 21;
    const fs::path p = dir / "s.spec2d";
    write_spectrum(s, p);
    const Spectrum2D back = read_spectrum(p);
    CHECK(back.values == s.values);
    CHECK(back.grid.omega1_min == s.grid.omega1_min);
    CHECK(back.grid.n3 == s.grid.n3);
    CHECK(back.meta.parameter_hash == s.meta.parameter_hash);
    CHECK(back.meta.include_r2 == s.meta.include_r2);
    CHECK(back.meta.include_r3 == s.meta.include_r3);
    CHECK(back.meta.normalized);
    CHECK(back.meta.t2 == s.meta.t2);
    CHECK(back.meta.temperature == s.meta.temperature);
    CHECK(back.meta.rabi == s.meta.rabi);
    CHECK(back.meta.sigma == 2.6);
    CHECK(back.meta.n_nodes == 21);
    CHECK_FALSE(fs::exists(dir / "s.spec2d.tmp"));
  }

  SUBCASE("zero grid body") {
    Spectrum2D z;
    z.grid = FrequencyGrid::square(0.0, 1.0, 2);
    z.values = Eigen::MatrixXd::Zero(2, 2);
    const fs::path p = dir / "zero.spec2d";
    write_spectrum(z, p);
    std::istringstream is(slurp(p));
    std::string line;
    int header = 0;
    std::vector<std::string> body;
    while (std::getline(is, line)) {
      if (!line.empty() && line[0] == '#') {
        ++header;
      } else {
        body.push_back(line);
      }
    }
    CHECK(header > 0);
    REQUIRE(body.size() == 2);
    CHECK(body[0] == "0 0");
    CHECK(body[1] == "0 0");
  }

  SUBCASE("corruption is detected") {
    Spectrum2D z;
    z.grid = FrequencyGrid::square(0.0, 1.0, 2);
    z.values = Eigen::MatrixXd::Constant(2, 2, 0.25);
    const fs::path p = dir / "bad.spec2d";
    write_spectrum(z, p);
    std::string text = slurp(p);
    text[text.rfind("0.25")] = '1';
    std::ofstream(p, std::ios::binary | std::ios::trunc) << text;
    CHECK_THROWS_AS(read_spectrum(p), IntegrityError);
    CHECK_THROWS_AS(read_spectrum(dir / "missing.spec2d"), IoError);
    CHECK_THROWS_AS(write_spectrum(z, dir / "no" / "such" / "dir.spec2d"), IoError);
  }

  fs::remove_all(dir);
}
