#include <doctest.h>

#include <cmath>
#include <numbers>

#include "isoflow/mass.hpp"
#include "isoflow/measure.hpp"
#include "isoflow/metric.hpp"
#include "isoflow/shapes.hpp"
#include "oracles.hpp"

using namespace isoflow;
using doctest::Approx;

namespace {
const double pi = std::numbers::pi;

AxiGrid ball_grid(double radius, double h, double zc = 0.0) {
  AxiGrid g(radius + 6 * h, zc - radius - 6 * h, zc + radius + 6 * h, h);
  g.fill([&](double rho, double z) { return std::hypot(rho, z - zc) - radius; });
  return g;
}

ComponentMeasure only(const AmbientMetric& metric, const AxiGrid& g) {
  const ComponentSet cs = extract_components(g);
  REQUIRE(cs.size() == 1);
  return measure_components(metric, g, cs).front();
}
}  // namespace

TEST_CASE("component extraction") {
  AxiGrid empty(2, -2, 2, 0.1);
  empty.fill([](double, double) { return 1.0; });
  CHECK(extract_components(empty).empty());
  CHECK(count_components(empty) == 0);

  CHECK(extract_components(ball_grid(1, 0.1)).size() == 1);

  // Dumbbell with the neck cut out: two balls remain.
  AxiGrid bells(2, -4, 4, 0.05);
  bells.fill([](double rho, double z) {
    return std::min(std::hypot(rho, z - 2) - 1.2, std::hypot(rho, z + 2) - 1.2);
  });
  const ComponentSet two = extract_components(bells);
  CHECK(two.size() == 2);
  CHECK(count_components(bells) == 2);
  CHECK(two.components[0].first_node < two.components[1].first_node);
  CHECK(two.labels[two.components[0].first_node] == 0);
}

TEST_CASE("contours") {
  const double radius = 1.0, h = 0.05;
  const AxiGrid g = ball_grid(radius, h);
  const ComponentSet cs = extract_components(g);
  const auto curves = interface_contour(g, cs, 0);
  REQUIRE(curves.size() == 1);
  CHECK_FALSE(curves[0].closed);
  for (const auto& p : curves[0].points) CHECK(std::abs(std::hypot(p.rho, p.z) - radius) <= h);

  AxiGrid torus(3, -2, 2, 0.05);
  torus.fill([](double rho, double z) { return std::hypot(rho - 2.0, z) - 0.6; });
  const ComponentSet ts = extract_components(torus);
  REQUIRE(ts.size() == 1);
  const auto ring = interface_contour(torus, ts, 0);
  REQUIRE(ring.size() == 1);
  CHECK(ring[0].closed);

  AxiGrid empty(2, -2, 2, 0.1);
  empty.fill([](double, double) { return 1.0; });
  CHECK(interface_contour(empty, extract_components(empty), 0).empty());
}

TEST_CASE("perimeter and volume of balls") {
  const auto flat = AmbientMetric::euclidean();
  for (double radius : {1.0, 2.5}) {
    const double h = radius / 50;
    const auto c = only(flat, ball_grid(radius, h));
    CHECK(std::abs(c.perimeter / (4 * pi * radius * radius) - 1.0) < 2 * h / radius);
    CHECK(std::abs(c.volume / (4.0 / 3.0 * pi * std::pow(radius, 3)) - 1.0) < 0.02);
    CHECK(std::abs(std::pow(c.perimeter, 1.5) / c.volume / kSixSqrtPi - 1.0) < 0.02);
    CHECK(std::abs(c.h_sq_integral / (16 * pi) - 1.0) < 0.05);
  }

  const auto sch = AmbientMetric::schwarzschild(1);
  const double r = 3.0, h = r / 50;
  const auto c = only(sch, ball_grid(r, h));
  CHECK(std::abs(c.perimeter / oracle::area(1, r) - 1.0) < 0.02);
  CHECK(std::abs(c.volume / oracle::volume(1, r) - 1.0) < 0.02);
  CHECK(std::abs(hawking_mass(c.perimeter, c.h_sq_integral) - 1.0) < 0.05);
}

TEST_CASE("polyline perimeter matches the segment form") {
  const auto flat = AmbientMetric::euclidean();
  const AxiGrid g = ball_grid(1.0, 0.04);
  const ComponentSet cs = extract_components(g);
  const auto curves = interface_contour(g, cs, 0);
  const auto segs = contour_segments(g, cs);
  CHECK(g_perimeter(flat, curves[0]) == Approx(g_perimeter(flat, g, segs, 0)).epsilon(1e-12));
  CHECK(g_volume(flat, g, cs, 0) > 0.0);
}

TEST_CASE("near-horizon sphere has small H^2 integral") {
  const auto sch = AmbientMetric::schwarzschild(1);
  const auto far = only(sch, ball_grid(3.0, 0.03));
  const auto near = only(sch, ball_grid(0.6, 0.006));
  CHECK(near.h_sq_integral < 0.1 * far.h_sq_integral);
  // Hawking mass 1 gives int H^2 = 16 pi (1 - 1 / sqrt(A / 16 pi)), nearly 0 here.
  const double a = oracle::area(1, 0.6);
  const double expected = 16 * pi * (1 - 1 / std::sqrt(a / (16 * pi)));
  CHECK(std::abs(near.h_sq_integral - expected) < 0.05 * 16 * pi);
}

TEST_CASE("additivity over components") {
  const auto flat = AmbientMetric::euclidean();
  AxiGrid g(2, -4, 4, 0.05);
  g.fill([](double rho, double z) {
    return std::min(std::hypot(rho, z - 2) - 1.0, std::hypot(rho, z + 2) - 1.3);
  });
  const ComponentSet cs = extract_components(g);
  const auto parts = measure_components(flat, g, cs);
  REQUIRE(parts.size() == 2);
  AxiGrid top = g, bottom = g;
  top.fill([](double rho, double z) { return std::hypot(rho, z - 2) - 1.0; });
  bottom.fill([](double rho, double z) { return std::hypot(rho, z + 2) - 1.3; });
  const auto a = only(flat, top), b = only(flat, bottom);
  CHECK(parts[0].perimeter + parts[1].perimeter == Approx(a.perimeter + b.perimeter).epsilon(1e-12));
  CHECK(parts[0].volume + parts[1].volume == Approx(a.volume + b.volume).epsilon(1e-12));
}

TEST_CASE("first-order convergence under refinement") {
  const auto flat = AmbientMetric::euclidean();
  // Offset the centre so the two grids do not share a symmetric sampling.
  const double radius = 1.0;
  double prev_p = 0.0, prev_v = 0.0;
  for (double h : {0.08, 0.04, 0.02}) {
    const auto c = only(flat, ball_grid(radius, h, 0.013));
    const double ep = std::abs(c.perimeter / (4 * pi) - 1.0);
    const double ev = std::abs(c.volume / (4.0 / 3.0 * pi) - 1.0);
    if (prev_p > 0.0) {
      CHECK(ep <= prev_p / 2 * 1.5);
      CHECK(ev <= prev_v / 2 * 1.5);
    }
    prev_p = ep;
    prev_v = ev;
  }
}

TEST_CASE("translation by whole cells leaves measures unchanged") {
  const auto flat = AmbientMetric::euclidean();
  const double h = 0.05;
  AxiGrid a(2, -3, 3, h), b(2, -3, 3, h);
  a.fill([](double rho, double z) { return std::hypot(rho / 1.1, z - 0.2) - 1.0; });
  b.fill([&](double rho, double z) { return std::hypot(rho / 1.1, z - 0.2 - 7 * h) - 1.0; });
  // Shift the sampled values exactly rather than re-evaluating.
  for (int j = 0; j < b.n_z(); ++j)
    for (int i = 0; i < b.n_rho(); ++i) b.at(i, j) = j >= 7 ? a.at(i, j - 7) : 1.0;
  const auto ma = only(flat, a), mb = only(flat, b);
  CHECK(ma.perimeter == mb.perimeter);
  CHECK(ma.volume == mb.volume);
  CHECK(ma.h_sq_integral == mb.h_sq_integral);
}
