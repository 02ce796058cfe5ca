#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isoflow/grid.hpp"
#include "isoflow/measure.hpp"
#include "isoflow/metric.hpp"
#include "isoflow/shapes.hpp"

namespace isoflow {

/// Per-component data of one sweep. Frozen records keep the values they had
/// at their freeze time.
struct ComponentRecord {
  int id = 0;
  bool frozen = false;
  std::optional<double> freeze_time;
  double perimeter = 0.0;
  double volume = 0.0;
  double h_sq_integral = 0.0;
  double hawking = 0.0;
  double flat_length = 0.0;
  std::size_t curve_count = 0;
  std::size_t node_count = 0;
};

struct TraceSample {
  double t = 0.0;
  double area = 0.0;
  double volume = 0.0;
  double monotone_q = 0.0;  ///< phi_m(area) - volume, phi_m := 0 below the horizon area
  double ratio = 0.0;       ///< area^{3/2} / volume
  double flat_length = 0.0; ///< Euclidean length of all meridian contours
  std::size_t n_components = 0;
  std::size_t n_frozen = 0;
  std::vector<ComponentRecord> components;
  std::vector<std::uint8_t> inside;  ///< node mask, only when requested
};

struct FlowTrace {
  std::vector<TraceSample> samples;
  bool complete = false;               ///< everything frozen or vanished before t_max
  std::optional<double> terminal_time; ///< T
  double dt = 0.0;
  double h = 0.0;
  std::size_t steps = 0;
  std::vector<std::string> warnings;
};

/// Static stencil coefficients of the conformal metric on the grid.
struct StencilCoefficients {
  std::vector<double> inv_w4;  ///< w^-4
  std::vector<double> adv_r;   ///< 4 w^-4 d(ln w)/d rho
  std::vector<double> adv_z;   ///< 4 w^-4 d(ln w)/dz
  std::vector<std::uint8_t> active;
  double min_w4 = 1.0;
};

struct LevelSetState {
  AxiGrid grid;
  double t = 0.0;
  double threshold_mass = 0.0;
  std::vector<std::uint8_t> frozen;
  std::vector<double> arrival;  ///< first time each node left the region; +inf if never
  std::vector<ComponentRecord> components;
  std::vector<int> node_id;     ///< component id per node at the last sweep, -1 outside
  std::map<int, std::size_t> first_node_of;
  std::map<int, ComponentRecord> frozen_records;
  std::size_t component_count = 0;
  int next_id = 0;
  StencilCoefficients coeff;
  std::vector<std::string> warnings;
  std::vector<double> scratch;

  double freeze_area() const;
  std::size_t frozen_node_count() const;
};

LevelSetState make_state(const AmbientMetric& metric, AxiGrid grid, double threshold_mass);

/// Largest stable explicit step, 0.2 h^2 min(w^4) over active nodes.
double cfl_limit(const LevelSetState& state);

struct StepReport {
  std::size_t flipped = 0;        ///< nodes whose sign changed
  bool topology_suspect = false;  ///< some flip may have split, merged or removed a component
};

/// Advances every unfrozen active node by dt (H_g / w^2) |grad u|, where
/// H_g = w^-2 (H_flat + 4 d_nu ln w). Stable for dt <= cfl_limit(state); larger
/// steps are taken as asked and usually end in NumericalBlowup.
StepReport evolve_step(LevelSetState& state, const AmbientMetric& metric, double dt);

struct SweepOptions {
  bool full_measure = false;  ///< also compute int H^2, Hawking mass and curve counts
};

/// Labels components, matches them to earlier ids and freezes every live
/// component whose perimeter is below 36 pi m^2.
void freeze_sweep(LevelSetState& state, const AmbientMetric& metric,
                  const SweepOptions& options = {});

/// Replaces values by the signed flat distance to the current zero set,
/// leaving frozen nodes and every node's sign untouched.
void reinitialize(LevelSetState& state);

TraceSample sample(LevelSetState& state, const AmbientMetric& metric, bool with_mask = false);

struct FlowSettings {
  double threshold_mass = 0.0;
  double dt = 0.0;  ///< 0 selects the CFL limit
  double t_max = 1.0;
  double sample_interval = 0.05;
  int sweep_every = 5;
  int reinit_every = 20;
  bool record_masks = false;
};

struct FlowRun {
  FlowTrace trace;
  LevelSetState final_state;
};

/// Modified flow: evolve, sweep and reinitialise until every component is
/// frozen or has vanished, or t_max is reached.
FlowRun run_modified_flow(const AmbientMetric& metric, AxiGrid initial, const FlowSettings& settings);

/// settings.dt, or the CFL limit when it is 0, shrunk so that sample_interval is an
/// integer multiple. An explicit dt above the limit is kept, not clamped.
double select_dt(const LevelSetState& state, const FlowSettings& settings);

}  // namespace isoflow
