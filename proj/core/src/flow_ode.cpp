#include "isoflow/flow_ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "isoflow/errors.hpp"
#include "isoflow/profile.hpp"

namespace isoflow {

namespace {

double inner_floor(const AmbientMetric& metric) {
  return metric.horizon_radius() * (1.0 + 2e-12);
}

// y = (r, V); dV/dt = -H A because the inward metric speed is H.
std::array<double, 2> rhs(const AmbientMetric& metric, double r) {
  const double h = sphere_mean_curvature(metric, r);
  return {radial_speed(metric, r), -h * sphere_area(metric, r)};
}

void refresh(const AmbientMetric& metric, SymmetricFlowState& s) {
  s.area = sphere_area(metric, s.r);
  s.monotone_q = phi(metric.mass(), s.area) - s.volume;
}

}  // namespace

double radial_speed(const AmbientMetric& metric, double r) {
  const double w = metric.conformal_factor(r);
  return -sphere_mean_curvature(metric, r) / (w * w);
}

SymmetricFlowState initial_state(const AmbientMetric& metric, double r0) {
  if (!(r0 >= metric.horizon_radius() && r0 > 0.0)) {
    throw DomainError("symmetric flow: initial radius must lie on or outside the horizon");
  }
  SymmetricFlowState s;
  s.r = r0;
  s.volume = enclosed_volume(metric, r0);
  refresh(metric, s);
  return s;
}

bool step(const AmbientMetric& metric, SymmetricFlowState& s, double dt) {
  if (!(dt > 0.0)) {
    throw DomainError("symmetric flow: dt must be positive");
  }
  const double floor = inner_floor(metric);
  if (s.r <= floor) {
    return false;
  }
  auto clamp_stop = [&] {
    s.r = std::max(floor, metric.horizon_radius());
    s.t += dt;
    s.volume = s.r > 0.0 ? enclosed_volume(metric, s.r) : 0.0;
    if (s.r > 0.0) {
      refresh(metric, s);
    } else {
      s.area = 0.0;
      s.monotone_q = 0.0;
    }
    return false;
  };

  const auto k1 = rhs(metric, s.r);
  const double r2 = s.r + 0.5 * dt * k1[0];
  if (!(r2 > floor)) return clamp_stop();
  const auto k2 = rhs(metric, r2);
  const double r3 = s.r + 0.5 * dt * k2[0];
  if (!(r3 > floor)) return clamp_stop();
  const auto k3 = rhs(metric, r3);
  const double r4 = s.r + dt * k3[0];
  if (!(r4 > floor)) return clamp_stop();
  const auto k4 = rhs(metric, r4);

  const double r_next = s.r + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
  if (!(r_next > floor)) return clamp_stop();
  s.volume += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
  s.r = r_next;
  s.t += dt;
  refresh(metric, s);
  return true;
}

SymmetricFlowTrace run_symmetric_flow(const AmbientMetric& metric, double r0, double dt,
                                      double t_max) {
  SymmetricFlowTrace trace;
  SymmetricFlowState s = initial_state(metric, r0);
  trace.states.push_back(s);
  const auto n_steps = static_cast<long long>(std::floor(t_max / dt + 1e-9));
  for (long long i = 0; i < n_steps; ++i) {
    const double t_before = s.t;
    if (!step(metric, s, dt)) {
      // A sphere started on the horizon is stationary and records nothing new.
      trace.reached_horizon = true;
      if (s.t != t_before) trace.states.push_back(s);
      break;
    }
    trace.states.push_back(s);
  }
  return trace;
}

double SymmetricFlowTrace::relative_q_drift() const {
  if (states.empty() || !(states.front().volume > 0.0)) return 0.0;
  const double q0 = states.front().monotone_q;
  double worst = 0.0;
  for (const auto& s : states) {
    if (s.r > 0.0) worst = std::max(worst, std::abs(s.monotone_q - q0));
  }
  return worst / states.front().volume;
}

StepSizeChoice select_ode_step(const AmbientMetric& metric, double r0, double t_max,
                               double target, double min_reduction) {
  if (!(t_max > 0.0) || !(target > 0.0)) {
    throw DomainError("select_ode_step: t_max and target must be positive");
  }
  StepSizeChoice choice;
  auto drift_at = [&](double dt) {
    return run_symmetric_flow(metric, r0, dt, t_max).relative_q_drift();
  };
  // Start where the drift is well above round-off so the reduction is measurable.
  double dt = t_max / 50.0;
  double drift = drift_at(dt);
  while (drift < 1e-11 && dt < 0.25 * t_max) {
    dt *= 2.0;
    drift = drift_at(dt);
  }
  for (int halvings = 0; halvings < 16; ++halvings) {
    const double half = drift_at(0.5 * dt);
    choice.dt = dt;
    choice.drift = drift;
    choice.drift_half = half;
    choice.reduction = half > 0.0 ? drift / half : std::numeric_limits<double>::infinity();
    if (drift <= target && choice.reduction >= min_reduction) {
      choice.converged = true;
      return choice;
    }
    dt *= 0.5;
    drift = half;
  }
  return choice;
}

}  // namespace isoflow
