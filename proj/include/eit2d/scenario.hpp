#pragma once

// Named scenarios: config files, presets, execution.
//
// Config format: line-oriented `key = value` with `[section]` headers and
// `#` comments. Sections and keys:
//
//   [units]     mode = gamma1 | physical
//   [system]    gamma1 mode: gap, omega_a1, omega_b, omega_c, omega_g
//               physical mode (cm^-1): e1, e2, j, vibronic
//               both: mu_b_a1, mu_b_a2, mu_a1_c
//   [rates]     gamma1 (physical only, ps^-1), gamma_b, gamma_c,
//               deph_a1c, deph_a1b, deph_a2b, deph_bc, temperature
//               (kB*T in Gamma1 units, or kelvin in physical mode)
//   [drive]     rabi, resonant = true | false, nu_c (only when not resonant)
//   [scenario]  name, t2, pathways = r2 | r3 | r2+r3
//   [grid]      n1, n3, omega1_min, omega1_max, omega3_min, omega3_max
//   [disorder]  sigma, nodes, shift (a2 | symmetric)
//   [peaks]     prominence
//   [output]    dir
//
// Physical-mode rates are in ps^-1 and are divided by gamma1; energies are
// converted with wavenumber_to_rate and divided by gamma1. Gamma2 is never an
// input: it follows from detailed balance.

#include "eit2d/core.hpp"
#include "eit2d/oracle.hpp"
#include "eit2d/pathways.hpp"
#include "eit2d/spectrum.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace eit2d {

enum class UnitMode { gamma1, physical };

struct PhysicalInputs {
  double e1 = 0.0;        // cm^-1
  double e2 = 0.0;        // cm^-1
  double j = 0.0;         // cm^-1
  double vibronic = 0.0;  // cm^-1
  double gamma1 = 1.0;    // ps^-1
  double temperature_kelvin = 0.0;
  DimerLevels dimer{};    // cm^-1
};

struct ScenarioConfig {
  std::string name = "scenario";
  UnitMode units = UnitMode::gamma1;
  LevelSystem system;
  BathSpec bath;
  double t2 = 0.0;
  PathwaySelection pathways;
  FrequencyGrid grid;
  DisorderModel disorder;
  double prominence = 0.2;
  std::filesystem::path out_dir = ".";
  std::optional<PhysicalInputs> physical;

  RateSet rates() const { return thermal_rates(system, bath); }
  void validate() const;
};

/// Frequencies spanning both optical transitions with `margin` on each side.
FrequencyGrid default_grid(const LevelSystem& sys, int n = 256, double margin = 15.0);

/// Level layout used by the Gamma1-unit presets: g = 0, b = 745 cm^-1 at
/// Gamma1 = 10 ps^-1, c = 20, a1 = 300, a2 = 300 - gap.
LevelSystem preset_levels(double gap, double rabi);

ScenarioConfig parse_config(const std::filesystem::path& path);
ScenarioConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

std::vector<std::string> preset_names();
ScenarioConfig preset(const std::string& name);

SpectrumCase spectrum_case(const ScenarioConfig& config);

struct ScenarioResult {
  Spectrum2D spectrum;  // normalized
  std::vector<Peak> peaks;
  double seconds = 0.0;
};

ScenarioResult execute_scenario(const ScenarioConfig& config, unsigned threads = 1);

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitVerification = 3;
inline constexpr int kExitIo = 4;

/// Maps the active exception to an exit code and writes its message to err.
int exit_code_for_current_exception(std::ostream& err);

/// Writes <name>.spec2d and <name>.peaks to config.out_dir and prints a
/// one-line summary to out.
int run_scenario(const ScenarioConfig& config, std::ostream& out, std::ostream& err,
                 unsigned threads = 1);
int run_preset(const std::string& name, const std::filesystem::path& out_dir, std::ostream& out,
               std::ostream& err, unsigned threads = 1);

void write_peaks(const std::vector<Peak>& peaks, const std::string& name, double prominence,
                 const std::filesystem::path& path);

}  // namespace eit2d
