#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "isoflow/cli/config.hpp"

namespace isoflow::cli {

enum ExitCode : int { kOk = 0, kVerdictFailed = 1, kBadConfig = 2, kBlowup = 3 };

struct Verdict {
  bool pass = false;
  std::string anchor;
  double slack = 0.0;  ///< >= 0 when passing
};

struct ScenarioReport {
  std::string name;
  std::vector<Verdict> verdicts;
  std::vector<std::string> notes;  ///< measured values worth logging

  bool passed() const;
};

struct RunOptions {
  std::string out_dir;
  std::optional<double> h;   ///< overrides grid.h of every scenario
  std::optional<double> dt;  ///< overrides time.dt of every scenario
};

/// Output directory: the flag, then $ISOFLOW_OUT, then "isoflow-out".
std::string resolve_out_dir(const std::optional<std::string>& flag);

/// Runs one scenario and writes its artifacts under out_dir/<name>/.
/// Throws NumericalBlowup and DomainError.
ScenarioReport run_scenario(const Scenario& scenario, const std::string& out_dir);

/// Runs every scenario in order; returns an ExitCode.
int run_scenarios(std::vector<Scenario> scenarios, const RunOptions& options, std::ostream& log);

/// `isoflow run <config>`.
int run_config_file(const std::string& path, const RunOptions& options, std::ostream& log);

/// Built-in checks: lemma suites for m in {0.5, 1, 2}, ODE flows and a mass table.
std::vector<Scenario> builtin_suite();

std::string format_double(double x);

}  // namespace isoflow::cli
