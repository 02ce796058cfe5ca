#pragma once

#include <vector>

#include "isoflow/metric.hpp"

namespace isoflow {

/// Centred coordinate sphere moving by mean curvature flow.
///
/// The radius and the enclosed volume are integrated together, so
/// Q = phi_m(A) - V measures how well the integrated volume tracks the profile.
struct SymmetricFlowState {
  double t = 0.0;
  double r = 0.0;
  double area = 0.0;
  double volume = 0.0;
  double monotone_q = 0.0;  ///< phi_m(area) - volume
};

struct SymmetricFlowTrace {
  std::vector<SymmetricFlowState> states;
  bool reached_horizon = false;  ///< stopped at r = m/2 (or r = 0 when m = 0)

  /// max_t |Q(t) - Q(0)| / V(0)
  double relative_q_drift() const;
};

/// Coordinate speed dr/dt = -H(r) / w(r)^2.
double radial_speed(const AmbientMetric& metric, double r);

SymmetricFlowState initial_state(const AmbientMetric& metric, double r0);

/// One classical fourth-order Runge-Kutta step. Returns false (and leaves the
/// state clamped at the inner boundary) when the step would cross it.
bool step(const AmbientMetric& metric, SymmetricFlowState& state, double dt);

SymmetricFlowTrace run_symmetric_flow(const AmbientMetric& metric, double r0, double dt,
                                      double t_max);

struct StepSizeChoice {
  double dt = 0.0;
  double drift = 0.0;       ///< relative Q drift at dt
  double drift_half = 0.0;  ///< relative Q drift at dt / 2
  double reduction = 0.0;   ///< drift / drift_half, about 16 for a fourth-order scheme
  bool converged = false;
};

/// Halves dt from t_max / 50 until the Q drift is below target and halving
/// once more shrinks it by at least min_reduction.
StepSizeChoice select_ode_step(const AmbientMetric& metric, double r0, double t_max,
                               double target, double min_reduction = 12.0);

}  // namespace isoflow
