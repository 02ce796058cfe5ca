#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "isoflow/mass.hpp"
#include "isoflow/metric.hpp"
#include "isoflow/shapes.hpp"

namespace isoflow::cli {

/// Malformed configuration. `where` is "line L, column C" for syntax errors
/// and a JSON pointer such as "/scenarios/0/grid/h" for field errors.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

enum class Mode { lemma_suite, ode_flow, levelset_flow, mass_table };

std::string to_string(Mode mode);

struct MetricSpec {
  double m = 0.0;  ///< 0 for the Euclidean metric
  AmbientMetric build() const { return AmbientMetric::schwarzschild(m); }
};

struct GridSpec {
  double h = 0.0;
  int margin_cells = 8;
  std::optional<double> rho_max;
  std::optional<double> z_min;
  std::optional<double> z_max;
};

struct TimeSpec {
  std::optional<double> dt;  ///< empty selects the automatic choice
  double t_max = 1.0;
  double sample_interval = 0.05;
  int sweep_every = 5;
  int reinit_every = 20;
};

struct Tolerances {
  double q_drift = 1e-8;            ///< ode-flow relative Q drift
  double drift_reduction = 12.0;    ///< ode-flow drift ratio when halving dt
  double area_rate = 1e-6;          ///< ode-flow dA/dt against -H^2 A
  std::optional<double> q_slack;    ///< levelset-flow Q increase; default 1e-3 max(|Q0|, V0)
  double perimeter_slack = 3.0;     ///< multiples of h * contour length
  double ratio_growth = 0.03;
  double q_zero = 1e-3;             ///< Q(0) <= q_zero V(0) counts as Q(0) <= 0
  double resolved_cells = 10.0;     ///< ratio checks skip spheres smaller than this many cells
  double freeze_margin = 0.05;
  double hawking_margin = 0.05;
  double volume_constant_factor = 0.9;  ///< c0 = factor * 6 sqrt(pi)
  double iso_adm_constant = kIsoAdmConstant;
};

struct Scenario {
  std::string name;
  Mode mode = Mode::lemma_suite;
  MetricSpec metric;
  std::optional<ShapeSpec> shape;
  GridSpec grid;
  TimeSpec time;
  std::optional<double> threshold_mass;  ///< defaults to the metric mass
  Tolerances tolerances;
  std::vector<double> radii;             ///< mass-table coordinate radii
  bool write_arrival = false;
};

/// Parses the JSON configuration text. Throws ConfigError.
std::vector<Scenario> parse_config(const std::string& text);

std::vector<Scenario> load_config(const std::string& path);

}  // namespace isoflow::cli
