#include <doctest.h>

#include <cmath>

#include "isoflow/errors.hpp"
#include "isoflow/flow_ode.hpp"
#include "isoflow/metric.hpp"
#include "isoflow/profile.hpp"
#include "oracles.hpp"

using namespace isoflow;
using doctest::Approx;

TEST_CASE("Euclidean shrinking sphere follows sqrt(R^2 - 4t)") {
  for (double radius : {1.0, 3.0}) {
    const double dt = 1e-4 * radius * radius;
    const auto trace = run_symmetric_flow(AmbientMetric::euclidean(), radius, dt, 0.2 * radius * radius);
    REQUIRE(trace.states.size() > 100);
    double worst = 0.0;
    for (const auto& s : trace.states) {
      const double exact = std::sqrt(radius * radius - 4.0 * s.t);
      worst = std::max(worst, std::abs(s.r / exact - 1.0));
    }
    CHECK(worst < 1e-8);
  }
  const auto late = run_symmetric_flow(AmbientMetric::euclidean(), 1.0, 1e-5, 0.2499);
  CHECK(late.states.back().r == Approx(0.02).epsilon(1e-3));
}

TEST_CASE("radial speed is -H / w^2") {
  const auto g = AmbientMetric::schwarzschild(1);
  for (double r : {0.7, 2.0, 10.0}) {
    CHECK(radial_speed(g, r) ==
          Approx(-oracle::mean_curvature(1, r) / std::pow(oracle::w(1, r), 2)).epsilon(1e-8));
  }
  CHECK(radial_speed(g, 0.5) == Approx(0.0));
}

TEST_CASE("Q is conserved along the Schwarzschild flow") {
  const auto g = AmbientMetric::schwarzschild(1);
  const auto trace = run_symmetric_flow(g, 10.0, 0.01, 50.0);
  CHECK(trace.relative_q_drift() < 1e-8);
  for (const auto& s : trace.states) {
    CHECK(s.area == Approx(oracle::area(1, s.r)).epsilon(1e-12));
  }
}

TEST_CASE("horizon sphere is stationary") {
  const auto g = AmbientMetric::schwarzschild(1);
  SymmetricFlowState s = initial_state(g, 0.5);
  const double r = s.r;
  step(g, s, 0.1);
  CHECK(s.r == Approx(r));
  CHECK_THROWS_AS(initial_state(g, 0.4), DomainError);
}

TEST_CASE("area and volume decrease, Hawking mass stays at m") {
  const auto g = AmbientMetric::schwarzschild(1);
  const auto trace = run_symmetric_flow(g, 2.0, 0.01, 5.0);
  for (std::size_t k = 1; k < trace.states.size(); ++k) {
    CHECK(trace.states[k].area < trace.states[k - 1].area);
    CHECK(trace.states[k].volume < trace.states[k - 1].volume);
  }
  const auto five = run_symmetric_flow(g, 5.0, 0.01, 10.0);
  for (const auto& s : five.states) CHECK(std::abs(sphere_hawking_mass(g, s.r) - 1.0) < 1e-10);
}

TEST_CASE("area rate is -H^2 A") {
  const auto g = AmbientMetric::schwarzschild(2);
  const double dt = 1e-3;
  const auto trace = run_symmetric_flow(g, 8.0, dt, 4.0);
  const auto& st = trace.states;
  for (std::size_t k = 2; k + 2 < st.size(); k += 97) {
    const double rate =
        (-st[k + 2].area + 8 * st[k + 1].area - 8 * st[k - 1].area + st[k - 2].area) / (12 * dt);
    const double hc = sphere_mean_curvature(g, st[k].r);
    CHECK(rate == Approx(-hc * hc * st[k].area).epsilon(1e-6));
  }
}

TEST_CASE("long flows stop at the horizon") {
  const auto g = AmbientMetric::schwarzschild(1);
  const auto trace = run_symmetric_flow(g, 1.0, 0.05, 1e4);
  CHECK(trace.states.back().r >= 0.5);
  CHECK(trace.states.back().r < 0.5 + 1e-3);
  const auto e = run_symmetric_flow(AmbientMetric::euclidean(), 1.0, 0.001, 1.0);
  CHECK(e.reached_horizon);
  CHECK(e.states.back().t < 0.25 + 0.0015);
}

TEST_CASE("step selection shows fourth-order convergence") {
  for (double m : {0.5, 1.0, 2.0}) {
    for (double f : {3.0, 10.0, 50.0}) {
      const double r0 = f * m;
      const auto choice = select_ode_step(AmbientMetric::schwarzschild(m), r0, 0.5 * r0 * r0, 1e-8);
      CHECK(choice.converged);
      CHECK(choice.drift <= 1e-8);
      CHECK(choice.reduction >= 12.0);
    }
  }
}
