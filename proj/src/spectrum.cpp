#include "eit2d/spectrum.hpp"

#include "eit2d/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace eit2d {

FrequencyGrid FrequencyGrid::square(double lo, double hi, int n) {
  return {lo, hi, n, lo, hi, n};
}

void FrequencyGrid::validate() const {
  if (n1 < 2 || n3 < 2) throw DomainError("FrequencyGrid: need at least 2 points per axis");
  if (!(omega1_max > omega1_min) || !(omega3_max > omega3_min)) {
    throw DomainError("FrequencyGrid: max must exceed min on both axes");
  }
  if (!std::isfinite(omega1_min) || !std::isfinite(omega1_max) || !std::isfinite(omega3_min) ||
      !std::isfinite(omega3_max)) {
    throw DomainError("FrequencyGrid: non-finite bounds");
  }
}

void DisorderModel::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("DisorderModel: sigma < 0");
  if (n_nodes < 1 || n_nodes % 2 == 0) {
    throw DomainError("DisorderModel: node count must be odd and >= 1");
  }
}

QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw DomainError("gauss_hermite: n < 1");
  // Golub-Welsch on the probabilists' Hermite recurrence.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) jac(k, k - 1) = jac(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    rule.nodes[k] = es.eigenvalues()(k);
    const double v0 = es.eigenvectors()(0, k);
    rule.weights[k] = v0 * v0;
  }
  for (int k = 0; k < n / 2; ++k) {
    const int m = n - 1 - k;
    const double x = 0.5 * (rule.nodes[m] - rule.nodes[k]);
    const double w = 0.5 * (rule.weights[m] + rule.weights[k]);
    rule.nodes[k] = -x;
    rule.nodes[m] = x;
    rule.weights[k] = rule.weights[m] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  double total = 0.0;
  for (double w : rule.weights) total += w;
  for (double& w : rule.weights) w /= total;
  return rule;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

void append(std::string& s, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g ", v);
  s += buf;
}

std::uint64_t mix(std::uint64_t h, const std::string& extra) {
  std::string s = std::to_string(h) + "|" + extra;
  return fnv1a64(s);
}

template <class F>
void parallel_rows(int rows, unsigned threads, F&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(rows));
  if (threads <= 1) {
    for (int p = 0; p < rows; ++p) body(p);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int p = static_cast<int>(t); p < rows; p += static_cast<int>(threads)) body(p);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

std::uint64_t parameter_hash(const LevelSystem& sys, const RateSet& rates, PathwaySelection sel,
                             double t2, const FrequencyGrid& grid) {
  std::string s;
  for (double v : {sys.omega_g, sys.omega_b, sys.omega_c, sys.omega_a2, sys.omega_a1, sys.mu_b_a1,
                   sys.mu_b_a2, sys.mu_a1_c, sys.rabi, sys.nu_c}) {
    append(s, v);
  }
  for (double v : {rates.gamma_down, rates.gamma_up, rates.gamma_b_down, rates.gamma_b_up,
                   rates.gamma_c_down, rates.gamma_c_up, rates.deph_a1c, rates.deph_a1b,
                   rates.deph_a2b, rates.deph_bc}) {
    append(s, v);
  }
  s += sel.include_r2 ? "r2 " : "- ";
  s += sel.include_r3 ? "r3 " : "- ";
  append(s, t2);
  for (double v : {grid.omega1_min, grid.omega1_max, grid.omega3_min, grid.omega3_max}) append(s, v);
  s += std::to_string(grid.n1) + " " + std::to_string(grid.n3);
  return fnv1a64(s);
}

Spectrum2D compute_spectrum(const LevelSystem& sys, const RateSet& rates, PathwaySelection sel,
                            double t2, const FrequencyGrid& grid, unsigned threads) {
  grid.validate();
  const ResponseKernel kernel(sys, rates, sel, t2);

  std::vector<AxisFactors> g1(grid.n1), g3(grid.n3);
  for (int p = 0; p < grid.n1; ++p) g1[p] = kernel.excitation(grid.omega1(p));
  for (int q = 0; q < grid.n3; ++q) g3[q] = kernel.detection(grid.omega3(q));

  Spectrum2D out;
  out.grid = grid;
  out.values.resize(grid.n1, grid.n3);
  parallel_rows(grid.n1, threads, [&](int p) {
    for (int q = 0; q < grid.n3; ++q) out.values(p, q) = kernel.combine(g1[p], g3[q]);
  });

  out.meta.parameter_hash = parameter_hash(sys, rates, sel, t2, grid);
  out.meta.include_r2 = sel.include_r2;
  out.meta.include_r3 = sel.include_r3;
  out.meta.t2 = t2;
  out.meta.rabi = sys.rabi;
  return out;
}

LevelSystem shifted_system(const LevelSystem& sys, double delta, DisorderShift shift) {
  LevelSystem s = sys;
  if (shift == DisorderShift::a2_only) {
    s.omega_a2 -= delta;
  } else {
    s.omega_a1 += 0.5 * delta;
    s.omega_c += 0.5 * delta;
    s.omega_a2 -= 0.5 * delta;
  }
  s.validate();
  return s;
}

Spectrum2D disorder_average(const LevelSystem& sys, const BathSpec& bath, PathwaySelection sel,
                            double t2, const FrequencyGrid& grid, const DisorderModel& dis,
                            unsigned threads) {
  dis.validate();
  const RateSet base_rates = thermal_rates(sys, bath);
  Spectrum2D out;
  if (dis.sigma == 0.0) {
    out = compute_spectrum(sys, base_rates, sel, t2, grid, threads);
  } else {
    const QuadratureRule rule = gauss_hermite(dis.n_nodes);
    out = compute_spectrum(sys, base_rates, sel, t2, grid, threads);
    out.values.setZero();
    for (int k = 0; k < dis.n_nodes; ++k) {
      const LevelSystem node = shifted_system(sys, dis.sigma * rule.nodes[k], dis.shift);
      const Spectrum2D s = compute_spectrum(node, thermal_rates(node, bath), sel, t2, grid, threads);
      out.values += rule.weights[k] * s.values;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "sigma=%.17g nodes=%d shift=%d", dis.sigma, dis.n_nodes,
                  static_cast<int>(dis.shift));
    out.meta.parameter_hash = mix(out.meta.parameter_hash, buf);
  }
  out.meta.sigma = dis.sigma;
  out.meta.n_nodes = dis.n_nodes;
  out.meta.temperature = bath.temperature;
  return out;
}

Spectrum2D normalize(const Spectrum2D& spec) {
  const double m = spec.values.size() ? spec.values.cwiseAbs().maxCoeff() : 0.0;
  if (!(m > 0.0)) throw DomainError("normalize: all-zero spectrum");
  Spectrum2D out = spec;
  out.values /= m;
  out.meta.normalized = true;
  return out;
}

std::vector<Peak> find_peaks(const Spectrum2D& spec, double min_prominence) {
  if (!(min_prominence > 0.0 && min_prominence < 1.0)) {
    throw DomainError("find_peaks: min_prominence must lie in (0, 1)");
  }
  const auto& v = spec.values;
  const double threshold = min_prominence * v.maxCoeff();
  std::vector<Peak> peaks;
  for (int p = 1; p + 1 < v.rows(); ++p) {
    for (int q = 1; q + 1 < v.cols(); ++q) {
      const double x = v(p, q);
      if (!(x > threshold)) continue;
      bool is_max = true;
      for (int dp = -1; dp <= 1 && is_max; ++dp) {
        for (int dq = -1; dq <= 1; ++dq) {
          if ((dp || dq) && !(x > v(p + dp, q + dq))) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) peaks.push_back({spec.grid.omega1(p), spec.grid.omega3(q), x, p, q});
    }
  }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.omega1 != b.omega1) return a.omega1 < b.omega1;
    return a.omega3 < b.omega3;
  });
  return peaks;
}

Peak refine_peak(const Spectrum2D& spec, const Peak& peak) {
  const auto& v = spec.values;
  auto offset = [](double l, double c, double r) {
    const double den = l - 2.0 * c + r;
    return den < 0.0 ? 0.5 * (l - r) / den : 0.0;
  };
  Peak out = peak;
  if (peak.p > 0 && peak.p + 1 < v.rows()) {
    out.omega1 += spec.grid.step1() *
                  offset(v(peak.p - 1, peak.q), v(peak.p, peak.q), v(peak.p + 1, peak.q));
  }
  if (peak.q > 0 && peak.q + 1 < v.cols()) {
    out.omega3 += spec.grid.step3() *
                  offset(v(peak.p, peak.q - 1), v(peak.p, peak.q), v(peak.p, peak.q + 1));
  }
  return out;
}

double saddle_ratio(const Spectrum2D& spec, double diagonal_offset, double min_prominence) {
  const std::vector<Peak> peaks = find_peaks(spec, min_prominence);
  if (peaks.size() != 4) return 1.0;
  const auto& v = spec.values;
  double worst = 0.0;
  for (std::size_t a = 0; a < peaks.size(); ++a) {
    for (std::size_t b = a + 1; b < peaks.size(); ++b) {
      const Peak& x = peaks[a];
      const Peak& y = peaks[b];
      if (std::abs(x.omega1 - y.omega1) > diagonal_offset &&
          std::abs(x.omega3 - y.omega3) > diagonal_offset) {
        continue;
      }
      const int n = std::max(std::abs(x.p - y.p), std::abs(x.q - y.q));
      double lowest = std::min(x.value, y.value);
      for (int k = 0; k <= n; ++k) {
        const double f = n ? static_cast<double>(k) / n : 0.0;
        const int p = static_cast<int>(std::lround(x.p + (y.p - x.p) * f));
        const int q = static_cast<int>(std::lround(x.q + (y.q - x.q) * f));
        lowest = std::min(lowest, v(p, q));
      }
      worst = std::max(worst, lowest / std::min(x.value, y.value));
    }
  }
  return worst;
}

// --- text format -------------------------------------------------------------

namespace {

std::string hex64(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string body_text(const Eigen::MatrixXd& values) {
  std::string body;
  body.reserve(static_cast<std::size_t>(values.size()) * 24);
  for (Eigen::Index p = 0; p < values.rows(); ++p) {
    for (Eigen::Index q = 0; q < values.cols(); ++q) {
      if (q) body += ' ';
      body += fmt(values(p, q));
    }
    body += '\n';
  }
  return body;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ptr != end || (ec != std::errc() && ec != std::errc::result_out_of_range)) {
    throw IntegrityError(path.string() + ": malformed number '" + s + "'");
  }
  return v;
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError(path.string() + ": cannot open for writing");
    os << content;
    os.flush();
    if (!os) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError(path.string() + ": write failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError(path.string() + ": rename failed");
  }
}

void write_spectrum(const Spectrum2D& spec, const std::filesystem::path& path) {
  const std::string body = body_text(spec.values);
  const auto& g = spec.grid;
  const auto& m = spec.meta;
  std::ostringstream head;
  head << "# eit2d-spectrum 1\n"
       << "# omega1 " << fmt(g.omega1_min) << ' ' << fmt(g.omega1_max) << ' ' << g.n1 << '\n'
       << "# omega3 " << fmt(g.omega3_min) << ' ' << fmt(g.omega3_max) << ' ' << g.n3 << '\n'
       << "# t2 " << fmt(m.t2) << '\n'
       << "# temperature " << fmt(m.temperature) << '\n'
       << "# rabi " << fmt(m.rabi) << '\n'
       << "# sigma " << fmt(m.sigma) << '\n'
       << "# nodes " << m.n_nodes << '\n'
       << "# pathways r2=" << m.include_r2 << " r3=" << m.include_r3 << '\n'
       << "# normalized " << m.normalized << '\n'
       << "# parameter_hash " << hex64(m.parameter_hash) << '\n'
       << "# checksum fnv1a64 " << hex64(fnv1a64(body)) << '\n';
  write_file_atomic(path, head.str() + body);
}

Spectrum2D read_spectrum(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError(path.string() + ": cannot open for reading");
  std::ostringstream all;
  all << is.rdbuf();
  const std::string text = all.str();

  Spectrum2D spec;
  std::string checksum;
  bool have_omega1 = false, have_omega3 = false;
  std::size_t pos = 0;
  while (pos < text.size() && text[pos] == '#') {
    const std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) throw IntegrityError(path.string() + ": truncated header");
    std::istringstream line(text.substr(pos + 1, end - pos - 1));
    pos = end + 1;
    std::string key;
    line >> key;
    if (key == "omega1") {
      line >> spec.grid.omega1_min >> spec.grid.omega1_max >> spec.grid.n1;
      have_omega1 = static_cast<bool>(line);
    } else if (key == "omega3") {
      line >> spec.grid.omega3_min >> spec.grid.omega3_max >> spec.grid.n3;
      have_omega3 = static_cast<bool>(line);
    } else if (key == "t2") {
      line >> spec.meta.t2;
    } else if (key == "temperature") {
      line >> spec.meta.temperature;
    } else if (key == "rabi") {
      line >> spec.meta.rabi;
    } else if (key == "sigma") {
      line >> spec.meta.sigma;
    } else if (key == "nodes") {
      line >> spec.meta.n_nodes;
    } else if (key == "pathways") {
      std::string r2, r3;
      line >> r2 >> r3;
      spec.meta.include_r2 = r2 == "r2=1";
      spec.meta.include_r3 = r3 == "r3=1";
    } else if (key == "normalized") {
      int n = 0;
      line >> n;
      spec.meta.normalized = n != 0;
    } else if (key == "parameter_hash") {
      std::string h;
      line >> h;
      spec.meta.parameter_hash = std::stoull(h, nullptr, 16);
    } else if (key == "checksum") {
      std::string algo;
      line >> algo >> checksum;
    }
  }
  if (!have_omega1 || !have_omega3 || checksum.empty()) {
    throw IntegrityError(path.string() + ": incomplete header");
  }
  const std::string body = text.substr(pos);
  if (hex64(fnv1a64(body)) != checksum) {
    throw IntegrityError(path.string() + ": checksum mismatch");
  }
  try {
    spec.grid.validate();
  } catch (const DomainError& e) {
    throw IntegrityError(path.string() + ": " + e.what());
  }

  spec.values.resize(spec.grid.n1, spec.grid.n3);
  std::istringstream rows(body);
  std::string row;
  for (int p = 0; p < spec.grid.n1; ++p) {
    if (!std::getline(rows, row)) throw IntegrityError(path.string() + ": missing rows");
    std::istringstream cells(row);
    std::string cell;
    for (int q = 0; q < spec.grid.n3; ++q) {
      if (!(cells >> cell)) throw IntegrityError(path.string() + ": short row");
      spec.values(p, q) = parse_double(cell, path);
    }
    if (cells >> cell) throw IntegrityError(path.string() + ": long row");
  }
  return spec;
}

}  // namespace eit2d
