#include "eit2d/scenario.hpp"

#include "eit2d/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace eit2d {

void ScenarioConfig::validate() const {
  system.validate();
  if (!(t2 >= 0.0)) throw ConfigurationError("t2 must be >= 0");
  if (!(bath.temperature > 0.0)) throw ConfigurationError("temperature must be > 0");
  pathways.validate();
  grid.validate();
  disorder.validate();
  if (!(prominence > 0.0 && prominence < 1.0)) {
    throw ConfigurationError("prominence must lie in (0, 1)");
  }
}

FrequencyGrid default_grid(const LevelSystem& sys, int n, double margin) {
  const double w1 = sys.transition(Level::a1, Level::b);
  const double w2 = sys.transition(Level::a2, Level::b);
  return FrequencyGrid::square(std::min(w1, w2) - margin, std::max(w1, w2) + margin, n);
}

LevelSystem preset_levels(double gap, double rabi) {
  const double omega_b = wavenumber_to_rate(745.0) / 10.0;
  return LevelSystem::resonant(0.0, omega_b, 20.0, 300.0 - gap, 300.0, rabi);
}

// --- config parsing ----------------------------------------------------------

namespace {

struct Entry {
  std::string value;
  int line;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Parser {
 public:
  Parser(const std::string& text, std::string origin) : origin_(std::move(origin)) { scan(text); }

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigurationError(origin_ + ":" + std::to_string(line) + ": " + msg);
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigurationError(origin_ + ": " + msg);
  }

  const Entry* find(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  double number(const Entry& e) const {
    double v = 0.0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
      fail(e.line, "malformed number '" + e.value + "'");
    }
    return v;
  }

  double number(const std::string& section, const std::string& key, double fallback) const {
    const Entry* e = find(section, key);
    return e ? number(*e) : fallback;
  }

  double required(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) fail("missing required key [" + section + "] " + key);
    return number(*e);
  }

  int integer(const std::string& section, const std::string& key, int fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    int v = 0;
    const char* first = e->value.data();
    const char* last = first + e->value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail(e->line, "malformed integer '" + e->value + "'");
    return v;
  }

  bool boolean(const std::string& section, const std::string& key, bool fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
    if (e->value == "false" || e->value == "no" || e->value == "0") return false;
    fail(e->line, "malformed boolean '" + e->value + "'");
  }

  const std::vector<std::pair<std::string, int>>& mode_lines() const { return modes_; }
  const std::map<std::string, Section>& sections() const { return sections_; }

 private:
  void scan(const std::string& text) {
    std::istringstream is(text);
    std::string raw;
    std::string current;
    int line = 0;
    while (std::getline(is, raw)) {
      ++line;
      const auto hash = raw.find('#');
      const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') fail(line, "malformed section header");
        current = trim(s.substr(1, s.size() - 2));
        if (!kKnown.count(current)) fail(line, "unknown section [" + current + "]");
        sections_[current];
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) fail(line, "expected key = value");
      if (current.empty()) fail(line, "key outside of a section");
      const std::string key = trim(s.substr(0, eq));
      const std::string value = trim(s.substr(eq + 1));
      if (!kKnown.at(current).count(key)) fail(line, "unknown key '" + key + "' in [" + current + "]");
      if (current == "units" && key == "mode") {
        modes_.emplace_back(value, line);
        continue;
      }
      auto& sec = sections_[current];
      if (const auto it = sec.find(key); it != sec.end()) {
        fail(line, "duplicate key '" + key + "' (first set on line " +
                       std::to_string(it->second.line) + ")");
      }
      sec[key] = {value, line};
    }
  }

  inline static const std::map<std::string, std::set<std::string>> kKnown = {
      {"units", {"mode"}},
      {"system",
       {"gap", "omega_a1", "omega_b", "omega_c", "omega_g", "e1", "e2", "j", "vibronic", "mu_b_a1",
        "mu_b_a2", "mu_a1_c"}},
      {"rates",
       {"gamma1", "gamma_b", "gamma_c", "deph_a1c", "deph_a1b", "deph_a2b", "deph_bc",
        "temperature"}},
      {"drive", {"rabi", "resonant", "nu_c"}},
      {"scenario", {"name", "t2", "pathways"}},
      {"grid", {"n1", "n3", "omega1_min", "omega1_max", "omega3_min", "omega3_max"}},
      {"disorder", {"sigma", "nodes", "shift"}},
      {"peaks", {"prominence"}},
      {"output", {"dir"}},
  };

  std::string origin_;
  std::map<std::string, Section> sections_;
  std::vector<std::pair<std::string, int>> modes_;
};

UnitMode resolve_mode(const Parser& ps) {
  const auto& modes = ps.mode_lines();
  if (modes.empty()) ps.fail("no unit mode declared ([units] mode = gamma1 | physical)");
  std::set<std::string> distinct;
  for (const auto& [value, line] : modes) {
    if (value != "gamma1" && value != "physical") ps.fail(line, "unknown unit mode '" + value + "'");
    distinct.insert(value);
  }
  if (distinct.size() > 1) {
    std::string msg = "conflicting unit modes declared";
    for (const auto& [value, line] : modes) msg += "; line " + std::to_string(line) + ": " + value;
    ps.fail(modes.front().second, msg);
  }
  if (modes.size() > 1) {
    ps.fail(modes[1].second, "unit mode declared twice (first on line " +
                                 std::to_string(modes[0].second) + ")");
  }
  return modes.front().first == "gamma1" ? UnitMode::gamma1 : UnitMode::physical;
}

void reject_keys(const Parser& ps, const std::string& section,
                 std::initializer_list<const char*> keys, const char* mode) {
  for (const char* k : keys) {
    if (const Entry* e = ps.find(section, k)) {
      ps.fail(e->line, std::string("key '") + k + "' is not valid in " + mode + " mode");
    }
  }
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin) {
  const Parser ps(text, origin);
  ScenarioConfig cfg;
  cfg.units = resolve_mode(ps);

  const Entry* temp = ps.find("rates", "temperature");
  if (!temp) ps.fail("missing required key [rates] temperature");
  const double temperature = ps.number(*temp);
  if (!(temperature > 0.0)) ps.fail(temp->line, "temperature must be > 0");

  const Entry* t2 = ps.find("scenario", "t2");
  cfg.t2 = t2 ? ps.number(*t2) : 0.0;
  if (t2 && !(cfg.t2 >= 0.0)) ps.fail(t2->line, "t2 must be >= 0");

  double scale = 1.0;          // divides rates
  double energy_scale = 1.0;   // converts energies to internal units
  if (cfg.units == UnitMode::gamma1) {
    reject_keys(ps, "system", {"e1", "e2", "j", "vibronic"}, "gamma1");
    reject_keys(ps, "rates", {"gamma1"}, "gamma1");
    const double gap = ps.required("system", "gap");
    const double a1 = ps.number("system", "omega_a1", 300.0);
    cfg.system.omega_g = ps.number("system", "omega_g", 0.0);
    cfg.system.omega_b = ps.number("system", "omega_b", wavenumber_to_rate(745.0) / 10.0);
    cfg.system.omega_c = ps.number("system", "omega_c", 20.0);
    cfg.system.omega_a1 = a1;
    cfg.system.omega_a2 = a1 - gap;
    cfg.bath.temperature = temperature;
  } else {
    reject_keys(ps, "system", {"gap", "omega_a1", "omega_b", "omega_c", "omega_g"}, "physical");
    PhysicalInputs phys;
    phys.e1 = ps.required("system", "e1");
    phys.e2 = ps.required("system", "e2");
    phys.j = ps.required("system", "j");
    phys.vibronic = ps.required("system", "vibronic");
    const Entry* g1 = ps.find("rates", "gamma1");
    if (!g1) ps.fail("missing required key [rates] gamma1");
    phys.gamma1 = ps.number(*g1);
    if (!(phys.gamma1 > 0.0)) ps.fail(g1->line, "gamma1 must be > 0");
    phys.temperature_kelvin = temperature;
    phys.dimer = dimer_levels(phys.e1, phys.e2, phys.j);

    scale = phys.gamma1;
    energy_scale = wavenumber_to_rate(1.0) / phys.gamma1;
    cfg.system.omega_g = 0.0;
    cfg.system.omega_c = 0.0;
    cfg.system.omega_b = phys.vibronic * energy_scale;
    cfg.system.omega_a1 = phys.dimer.eps1 * energy_scale;
    cfg.system.omega_a2 = phys.dimer.eps2 * energy_scale;
    cfg.bath.temperature = kBoltzmannWavenumberPerKelvin * temperature * energy_scale;
    cfg.physical = phys;
  }

  cfg.system.mu_b_a1 = ps.number("system", "mu_b_a1", 1.0);
  cfg.system.mu_b_a2 = ps.number("system", "mu_b_a2", 1.0);
  cfg.system.mu_a1_c = ps.number("system", "mu_a1_c", 1.0);

  cfg.bath.gamma1 = 1.0;
  cfg.bath.gamma_b = ps.number("rates", "gamma_b", 0.0) / scale;
  cfg.bath.gamma_c = ps.number("rates", "gamma_c", 0.0) / scale;
  cfg.bath.deph_a1c = ps.number("rates", "deph_a1c", 0.0) / scale;
  cfg.bath.deph_a1b = ps.number("rates", "deph_a1b", 0.0) / scale;
  cfg.bath.deph_a2b = ps.number("rates", "deph_a2b", 0.0) / scale;
  cfg.bath.deph_bc = ps.number("rates", "deph_bc", 0.0) / scale;

  cfg.system.rabi = ps.number("drive", "rabi", 0.0) / scale;
  const bool resonant = ps.boolean("drive", "resonant", true);
  if (resonant) {
    if (const Entry* e = ps.find("drive", "nu_c")) ps.fail(e->line, "nu_c given for a resonant drive");
    cfg.system.nu_c = cfg.system.omega_a1 - cfg.system.omega_c;
  } else {
    const Entry* e = ps.find("drive", "nu_c");
    if (!e) ps.fail("resonant = false requires [drive] nu_c");
    cfg.system.nu_c = ps.number(*e) * (cfg.units == UnitMode::physical ? energy_scale : 1.0);
  }

  if (const Entry* e = ps.find("scenario", "name")) {
    if (e->value.empty() || e->value.find('/') != std::string::npos) {
      ps.fail(e->line, "invalid scenario name '" + e->value + "'");
    }
    cfg.name = e->value;
  }
  if (const Entry* e = ps.find("scenario", "pathways")) {
    if (e->value == "r2") {
      cfg.pathways = PathwaySelection::r2_only();
    } else if (e->value == "r3") {
      cfg.pathways = PathwaySelection::r3_only();
    } else if (e->value == "r2+r3") {
      cfg.pathways = PathwaySelection::both();
    } else {
      ps.fail(e->line, "pathways must be r2, r3 or r2+r3");
    }
  }

  try {
    cfg.system.validate();
  } catch (const DomainError& ex) {
    ps.fail(ex.what());
  }

  const int n1 = ps.integer("grid", "n1", 256);
  const int n3 = ps.integer("grid", "n3", 256);
  FrequencyGrid grid = default_grid(cfg.system);
  grid.n1 = n1;
  grid.n3 = n3;
  const double es = cfg.units == UnitMode::physical ? energy_scale : 1.0;
  grid.omega1_min = ps.number("grid", "omega1_min", grid.omega1_min / es) * es;
  grid.omega1_max = ps.number("grid", "omega1_max", grid.omega1_max / es) * es;
  grid.omega3_min = ps.number("grid", "omega3_min", grid.omega3_min / es) * es;
  grid.omega3_max = ps.number("grid", "omega3_max", grid.omega3_max / es) * es;
  cfg.grid = grid;

  cfg.disorder.sigma = ps.number("disorder", "sigma", 0.0);
  cfg.disorder.n_nodes = ps.integer("disorder", "nodes", 21);
  if (const Entry* e = ps.find("disorder", "shift")) {
    if (e->value == "a2") {
      cfg.disorder.shift = DisorderShift::a2_only;
    } else if (e->value == "symmetric") {
      cfg.disorder.shift = DisorderShift::symmetric;
    } else {
      ps.fail(e->line, "unknown disorder shift '" + e->value + "' (a2 | symmetric)");
    }
  }
  cfg.prominence = ps.number("peaks", "prominence", 0.2);
  if (const Entry* e = ps.find("output", "dir")) cfg.out_dir = e->value;

  try {
    cfg.validate();
  } catch (const ConfigurationError& ex) {
    ps.fail(ex.what());
  } catch (const DomainError& ex) {
    ps.fail(ex.what());
  }
  return cfg;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError(path.string() + ": cannot open config");
  std::ostringstream text;
  text << is.rdbuf();
  return parse_config_text(text.str(), path.string());
}

// --- presets -----------------------------------------------------------------

std::vector<std::string> preset_names() {
  return {"fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b", "fig3c", "fig3d",
          "fig3e", "fig3f", "fig4a", "fig4b", "fig6a", "fig6b", "fig6c", "fig6d"};
}

namespace {

ScenarioConfig near_resonant(const std::string& name, char panel) {
  double kt = 0.01, rabi = 9.0;
  switch (panel) {
    case 'a': rabi = 0.0; break;
    case 'b': break;
    case 'c': kt = 0.1; break;
    case 'd': kt = 5.0; break;
    default: throw ConfigurationError("unknown preset '" + name + "'");
  }
  ScenarioConfig cfg;
  cfg.name = name;
  cfg.system = preset_levels(0.18, rabi);
  cfg.bath.temperature = kt;
  cfg.bath.deph_a1c = cfg.bath.deph_a1b = cfg.bath.deph_a2b = 10.0;
  cfg.bath.deph_bc = 0.1;
  cfg.t2 = 3.0;
  cfg.grid = default_grid(cfg.system);
  return cfg;
}

}  // namespace

ScenarioConfig preset(const std::string& name) {
  if (name.size() != 5 || name.rfind("fig", 0) != 0) {
    throw ConfigurationError("unknown preset '" + name + "'");
  }
  const char fig = name[3];
  const char panel = name[4];
  ScenarioConfig cfg;
  if (fig == '2') {
    cfg = near_resonant(name, panel);
  } else if (fig == '3') {
    if (panel < 'a' || panel > 'f') throw ConfigurationError("unknown preset '" + name + "'");
    const int k = panel - 'a';
    cfg.name = name;
    cfg.system = preset_levels(50.0, 9.0);
    cfg.bath.temperature = k < 3 ? 1.0 : 1000.0;
    cfg.bath.deph_a1c = cfg.bath.deph_a1b = cfg.bath.deph_a2b = 0.5;
    cfg.bath.deph_bc = 0.1;
    cfg.t2 = std::array<double, 3>{0.0, 0.5, 5.0}[k % 3];
    cfg.grid = default_grid(cfg.system);
  } else if (fig == '4') {
    if (panel != 'a' && panel != 'b') throw ConfigurationError("unknown preset '" + name + "'");
    cfg = near_resonant(name, 'd');
    cfg.disorder.sigma = panel == 'a' ? 1.0 : 2.6;
  } else if (fig == '6') {
    cfg = near_resonant(name, panel);
    cfg.pathways = PathwaySelection::both();
    cfg.bath.gamma_b = 0.01;
    cfg.t2 = 3.0 / cfg.bath.gamma_b;
  } else {
    throw ConfigurationError("unknown preset '" + name + "'");
  }
  cfg.validate();
  return cfg;
}

SpectrumCase spectrum_case(const ScenarioConfig& config) {
  return {config.name, config.system, config.rates(), config.pathways, config.t2, config.grid};
}

// --- execution ---------------------------------------------------------------

ScenarioResult execute_scenario(const ScenarioConfig& config, unsigned threads) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  ScenarioResult r;
  r.spectrum = normalize(disorder_average(config.system, config.bath, config.pathways, config.t2,
                                          config.grid, config.disorder, threads));
  r.peaks = find_peaks(r.spectrum, config.prominence);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

void write_peaks(const std::vector<Peak>& peaks, const std::string& name, double prominence,
                 const std::filesystem::path& path) {
  std::string s = "# eit2d-peaks 1\n# name " + name + "\n";
  char buf[96];
  std::snprintf(buf, sizeof buf, "# prominence %.17g\n# count %zu\n", prominence, peaks.size());
  s += buf;
  s += "# omega1 omega3 value\n";
  for (const Peak& p : peaks) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.omega1, p.omega3, p.value);
    s += buf;
  }
  write_file_atomic(path, s);
}

int exit_code_for_current_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ConfigurationError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const AccuracyError& e) {
    err << "verification error: " << e.what() << '\n';
    return kExitVerification;
  } catch (const IntegrityError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const InputError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_scenario(const ScenarioConfig& config, std::ostream& out, std::ostream& err,
                 unsigned threads) {
  try {
    config.validate();
    std::filesystem::create_directories(config.out_dir);
    const ScenarioResult r = execute_scenario(config, threads);
    Spectrum2D spec = r.spectrum;
    write_spectrum(spec, config.out_dir / (config.name + ".spec2d"));
    write_peaks(r.peaks, config.name, config.prominence, config.out_dir / (config.name + ".peaks"));

    Eigen::Index p = 0, q = 0;
    spec.values.maxCoeff(&p, &q);
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s: %zu peaks, max at (omega1=%.4f, omega3=%.4f), %.3f s",
                  config.name.c_str(), r.peaks.size(), spec.grid.omega1(static_cast<int>(p)),
                  spec.grid.omega3(static_cast<int>(q)), r.seconds);
    out << buf << '\n';
    return kExitOk;
  } catch (...) {
    return exit_code_for_current_exception(err);
  }
}

int run_preset(const std::string& name, const std::filesystem::path& out_dir, std::ostream& out,
               std::ostream& err, unsigned threads) {
  try {
    ScenarioConfig cfg = preset(name);
    cfg.out_dir = out_dir;
    return run_scenario(cfg, out, err, threads);
  } catch (...) {
    return exit_code_for_current_exception(err);
  }
}

}  // namespace eit2d
