#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "isoflow/cli/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"isoflow: isoperimetric mass and modified mean curvature flow scenarios"};
  app.require_subcommand(1);

  std::optional<std::string> out;
  std::optional<double> h, dt;
  std::string config;

  auto* run = app.add_subcommand("run", "Run the scenarios of a JSON configuration file");
  run->set_help_flag("--help", "Print this help message and exit");  // --h is the grid spacing
  run->add_option("config", config, "Configuration file")->required();
  auto* suite = app.add_subcommand("suite", "Run the built-in profile, ODE and mass-table checks");

  for (auto* sub : {run, suite}) {
    sub->add_option("--out", out, "Output directory (default $ISOFLOW_OUT or ./isoflow-out)");
  }
  run->add_option("--h", h, "Override the grid spacing of every scenario")
      ->check(CLI::PositiveNumber);
  run->add_option("--dt", dt, "Override the time step of every scenario")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : isoflow::cli::kBadConfig;
  }

  isoflow::cli::RunOptions options;
  options.out_dir = isoflow::cli::resolve_out_dir(out);
  options.h = h;
  options.dt = dt;
  if (*run) return isoflow::cli::run_config_file(config, options, std::cout);
  return isoflow::cli::run_scenarios(isoflow::cli::builtin_suite(), options, std::cout);
}
