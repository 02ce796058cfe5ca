#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "isoflow/flow_levelset.hpp"
#include "isoflow/metric.hpp"
#include "isoflow/profile.hpp"
#include "isoflow/shapes.hpp"

using namespace isoflow;
using doctest::Approx;

namespace {
const double pi = std::numbers::pi;

AxiGrid ball(double radius, double h, double pad = 8.0) {
  AxiGrid g(radius + pad * h, -radius - pad * h, radius + pad * h, h);
  g.fill([&](double rho, double z) { return std::hypot(rho, z) - radius; });
  return g;
}

double gradient_norm(const AxiGrid& g, int i, int j) {
  const double h = g.h();
  const double ur = (g.ghosted(i + 1, j) - g.ghosted(i - 1, j)) / (2 * h);
  const double uz = (g.ghosted(i, j + 1) - g.ghosted(i, j - 1)) / (2 * h);
  return std::hypot(ur, uz);
}
}  // namespace

TEST_CASE("CFL limit and step selection") {
  const auto sch = AmbientMetric::schwarzschild(1);
  const LevelSetState st = make_state(sch, ball(3.0, 0.05), 1.0);
  CHECK(cfl_limit(st) == Approx(0.2 * 0.05 * 0.05 * st.coeff.min_w4));
  CHECK(st.coeff.min_w4 >= 1.0);
  FlowSettings fs;
  fs.sample_interval = 0.05;
  const double dt = select_dt(st, fs);
  CHECK(dt <= cfl_limit(st));
  const double ratio = fs.sample_interval / dt;
  CHECK(ratio == Approx(std::round(ratio)).epsilon(1e-12));
}

TEST_CASE("frozen nodes never move") {
  const auto flat = AmbientMetric::euclidean();
  LevelSetState st = make_state(flat, ball(1.0, 0.05), 0.0);
  std::fill(st.frozen.begin(), st.frozen.end(), std::uint8_t{1});
  const auto before = st.grid.values();
  for (int k = 0; k < 10; ++k) evolve_step(st, flat, cfl_limit(st));
  CHECK(st.grid.values() == before);
  reinitialize(st);
  CHECK(st.grid.values() == before);
}

TEST_CASE("reinitialization") {
  const double h = 0.04;
  const auto flat = AmbientMetric::euclidean();

  SUBCASE("distance field stays put") {
    LevelSetState st = make_state(flat, ball(1.0, h), 0.0);
    const auto before = st.grid.values();
    reinitialize(st);
    const auto& after = st.grid.values();
    double worst = 0.0;
    for (std::size_t k = 0; k < before.size(); ++k) {
      CHECK((before[k] < 0) == (after[k] < 0));
      if (std::abs(before[k]) < 2 * h) worst = std::max(worst, std::abs(after[k] - before[k]));
    }
    CHECK(worst <= 0.5 * h);
  }

  SUBCASE("steep field becomes a distance") {
    AxiGrid g(2.0, -2.0, 2.0, h);
    g.fill([](double rho, double z) {
      return 25.0 * (std::hypot(rho / 1.2, z) - 1.0) * (1.0 + 0.5 * rho * rho);
    });
    LevelSetState st = make_state(flat, g, 0.0);
    const auto before = st.grid.values();
    reinitialize(st);
    std::size_t good = 0, total = 0;
    for (int j = 1; j + 1 < st.grid.n_z(); ++j) {
      for (int i = 0; i + 1 < st.grid.n_rho(); ++i) {
        const std::size_t idx = st.grid.index(i, j);
        CHECK((before[idx] < 0) == (st.grid.values()[idx] < 0));
        if (std::abs(st.grid.values()[idx]) < 2 * h) continue;
        ++total;
        const double n = gradient_norm(st.grid, i, j);
        if (n >= 0.8 && n <= 1.2) ++good;
      }
    }
    CHECK(static_cast<double>(good) >= 0.99 * static_cast<double>(total));
  }
}

TEST_CASE("freeze sweep") {
  const auto flat = AmbientMetric::euclidean();

  SUBCASE("zero threshold never freezes") {
    LevelSetState st = make_state(flat, ball(0.5, 0.05), 0.0);
    freeze_sweep(st, flat);
    REQUIRE(st.components.size() == 1);
    CHECK_FALSE(st.components[0].frozen);
    CHECK(st.frozen_node_count() == 0);
  }

  SUBCASE("small sphere freezes at the first sweep") {
    const double radius = std::sqrt(7.5);  // perimeter 30 pi
    LevelSetState st = make_state(flat, ball(radius, 0.05), 1.0);
    freeze_sweep(st, flat);
    REQUIRE(st.components.size() == 1);
    CHECK(st.components[0].frozen);
    CHECK(st.components[0].freeze_time.value() == 0.0);
    CHECK(st.components[0].perimeter == Approx(30 * pi).epsilon(0.02));
    CHECK(st.frozen_node_count() > 0);
  }

  SUBCASE("large sphere stays live") {
    LevelSetState st = make_state(flat, ball(3.5, 0.05), 1.0);
    freeze_sweep(st, flat);
    CHECK_FALSE(st.components[0].frozen);
  }
}

TEST_CASE("Euclidean sphere shrinks like sqrt(R^2 - 4t)") {
  const double h = 1.0 / 40;
  FlowSettings fs;
  fs.t_max = 0.15;
  fs.sample_interval = 0.025;
  const FlowRun run = run_modified_flow(AmbientMetric::euclidean(), ball(1.0, h), fs);
  REQUIRE(run.trace.samples.size() >= 6);
  double prev = run.trace.samples.front().area;
  for (const auto& s : run.trace.samples) {
    const double radius = std::sqrt(s.area / (4 * pi));
    CHECK(std::abs(radius / std::sqrt(1 - 4 * s.t) - 1.0) < 0.02);
    CHECK(s.area <= prev);
    prev = s.area;
  }
  CHECK_FALSE(run.trace.complete);
}

TEST_CASE("dumbbell halves freeze only after the neck pinches") {
  const ShapeSpec shape = ShapeSpec::dumbbell(4.0, 13.5, 1.0);
  FlowSettings fs;
  fs.threshold_mass = 1.0;
  fs.t_max = 5.0;
  fs.sample_interval = 0.05;
  const FlowRun run = run_modified_flow(AmbientMetric::euclidean(), make_grid(shape, 0.1), fs);
  const auto& samples = run.trace.samples;
  CHECK(run.trace.complete);
  CHECK(samples.front().n_components == 1);
  CHECK(samples.front().area > convexity_threshold(1.0));

  double split_time = -1.0;
  for (const auto& s : samples) {
    if (s.n_components == 2 && split_time < 0) split_time = s.t;
  }
  REQUIRE(split_time > 0.0);
  const auto& last = samples.back().components;
  REQUIRE(last.size() == 2);
  std::size_t frozen_before = 0;
  for (const auto& c : last) {
    CHECK(c.frozen);
    CHECK(*c.freeze_time >= split_time - fs.sample_interval);
    CHECK(c.perimeter < convexity_threshold(1.0) * 1.05);
  }
  // The frozen node count never decreases.
  for (const auto& s : samples) {
    CHECK(s.n_frozen >= frozen_before);
    frozen_before = s.n_frozen;
  }
}
