// Command-line front end: spectrum, propagate, sweep, design, regime.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "slowlight/cli/commands.hpp"

namespace {

struct ConfigArgs {
  std::string config_path;
  slowlight::cli::Overrides overrides;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("--config", args.config_path, "run configuration (JSON)")->required();
  cmd->add_option("--temp-c", args.overrides.temperature_c, "cell temperature, degC");
  cmd->add_option("--length-m", args.overrides.length_m, "single-pass cell length, m");
  cmd->add_option("--passes", args.overrides.passes, "number of passes");
  cmd->add_option("--t0-fs", args.overrides.t0_fs, "pulse intensity FWHM, fs");
  cmd->add_option("--center-nm", args.overrides.center_nm, "pulse center wavelength, nm");
  cmd->add_option("--out", args.overrides.out, "output file (default: stdout)");
  cmd->add_option("--format", args.overrides.format, "csv or json");
}

slowlight::cli::RunConfig load(const ConfigArgs& args) {
  auto config = slowlight::cli::load_run_config(args.config_path);
  slowlight::cli::apply(config, args.overrides);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace slowlight;
  CLI::App app{"Broadband slow-light simulator for warm alkali vapor"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "sweep worker threads (0: hardware concurrency)");

  ConfigArgs spectrum_args, propagate_args, sweep_args, design_args;
  auto* spectrum = app.add_subcommand("spectrum", "group delay / index / transmission vs wavelength");
  add_config_options(spectrum, spectrum_args);
  auto* propagate = app.add_subcommand("propagate", "propagate one pulse and report metrics");
  add_config_options(propagate, propagate_args);
  auto* sweep = app.add_subcommand("sweep", "temperature sweep of full propagations");
  add_config_options(sweep, sweep_args);
  auto* design = app.add_subcommand("design", "best fractional delay vs bandwidth under a distortion budget");
  add_config_options(design, design_args);

  auto* regime = app.add_subcommand("regime", "absorption vs dispersion broadening length ratio");
  double t0_fs = 0.0;
  double gamma = 0.0;
  std::optional<double> omega21;
  std::optional<double> ratio;
  regime->add_option("--t0-fs", t0_fs, "pulse intensity FWHM, fs")->required();
  regime->add_option("--gamma", gamma, "line half width gamma, rad/s")->required();
  auto* omega_opt = regime->add_option("--omega21", omega21, "half the line separation, rad/s");
  auto* ratio_opt = regime->add_option("--ratio", ratio, "omega21 / gamma");
  omega_opt->excludes(ratio_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }

  if (*spectrum) return cli::run_guarded([&] { cli::cmd_spectrum(load(spectrum_args)); });
  if (*propagate) return cli::run_guarded([&] { cli::cmd_propagate(load(propagate_args)); });
  if (*sweep) return cli::run_guarded([&] { cli::cmd_sweep(load(sweep_args), std::cout, threads); });
  if (*design) return cli::run_guarded([&] { cli::cmd_design(load(design_args), std::cout, threads); });
  return cli::run_guarded([&] {
    if (!omega21 && !ratio) throw ConfigError("regime: give --omega21 or --ratio");
    const double half_separation = omega21 ? *omega21 : *ratio * gamma;
    std::cout << cli::cmd_regime({t0_fs * 1e-15, gamma, half_separation}).dump(2) << '\n';
  });
}
