#include "eit2d/oracle.hpp"
#include "eit2d/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

void print_report(const char* label, const eit2d::OracleReport& r) {
  std::printf("%s: %s  max_rel_err=%.3e  tol=%.1e  cases=%zu  worst=[%s]\n", label,
              r.passed ? "PASS" : "FAIL", r.max_rel_err, r.tolerance, r.cases,
              r.worst_case.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rephasing 2D spectra of a driven four-level system"};
  app.require_subcommand(1);

  unsigned threads = 1;
  app.add_option("--threads", threads, "worker threads (0 = auto)");

  auto* sim = app.add_subcommand("simulate", "compute a spectrum from a config file or preset");
  std::string config_path, preset_name, out_dir;
  auto* cfg_opt = sim->add_option("--config", config_path, "scenario config file");
  auto* pre_opt = sim->add_option("--preset", preset_name, "named preset")
                      ->check(CLI::IsMember(eit2d::preset_names()));
  cfg_opt->excludes(pre_opt);
  sim->add_option("--out", out_dir, "output directory");

  auto* ver = app.add_subcommand("verify", "run the oracle comparisons");
  double tolerance = 1e-6;
  double spectrum_tolerance = 0.02;
  ver->add_option("--tolerance", tolerance, "Green-function relative tolerance");
  ver->add_option("--spectrum-tolerance", spectrum_tolerance,
                  "normalized peak-value tolerance for the FFT comparison");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : eit2d::kExitConfig;
  }

  if (sim->parsed()) {
    if (config_path.empty() && preset_name.empty()) {
      std::cerr << "simulate: one of --config or --preset is required\n";
      return eit2d::kExitConfig;
    }
    if (!preset_name.empty()) {
      return eit2d::run_preset(preset_name, out_dir.empty() ? "." : out_dir, std::cout, std::cerr,
                               threads);
    }
    try {
      eit2d::ScenarioConfig cfg = eit2d::parse_config(config_path);
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      return eit2d::run_scenario(cfg, std::cout, std::cerr, threads);
    } catch (...) {
      return eit2d::exit_code_for_current_exception(std::cerr);
    }
  }

  try {
    const auto green = eit2d::verify_green(tolerance);
    print_report("green", green);
    const auto spectrum = eit2d::verify_spectrum(spectrum_tolerance);
    print_report("spectrum", spectrum);
    return green.passed && spectrum.passed ? eit2d::kExitOk : eit2d::kExitVerification;
  } catch (...) {
    return eit2d::exit_code_for_current_exception(std::cerr);
  }
}
