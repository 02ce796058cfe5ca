#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "isoflow/errors.hpp"
#include "isoflow/metric.hpp"
#include "oracles.hpp"

using namespace isoflow;
using doctest::Approx;

namespace {
const double pi = std::numbers::pi;
AmbientMetric sch(double m) { return m == 0.0 ? AmbientMetric::euclidean() : AmbientMetric::schwarzschild(m); }
}  // namespace

TEST_CASE("sphere area closed form") {
  CHECK(sphere_area(sch(1), 0.5) == Approx(16 * pi).epsilon(1e-14));
  CHECK(sphere_area(sch(0), 2.0) == Approx(16 * pi).epsilon(1e-14));
  CHECK(sphere_area(sch(1), 10.0) == Approx(4 * pi * 100 * std::pow(1.05, 4)).epsilon(1e-14));
  CHECK(sphere_area(sch(1), 10.0) == Approx(1527.45).epsilon(1e-5));
  CHECK_THROWS_AS(sphere_area(sch(1), 0.49), DomainError);
}

TEST_CASE("area derivative matches finite differences") {
  CHECK(sphere_area_derivative(sch(1), 0.5) == Approx(0.0));
  CHECK(sphere_area_derivative(sch(0), 3.0) == Approx(24 * pi).epsilon(1e-14));
  CHECK(sphere_area_derivative(sch(1), 2.0) == Approx(73.63).epsilon(1e-4));
  for (double m : {0.5, 1.0, 2.0}) {
    for (double f : {0.7, 1.0, 3.0, 20.0}) {
      const double r = f * m;
      const double fd = oracle::derivative([m](double s) { return oracle::area(m, s); }, r, 1e-5 * r);
      CHECK(sphere_area_derivative(sch(m), r) == Approx(fd).epsilon(1e-8));
    }
  }
}

TEST_CASE("enclosed volume against quadrature") {
  CHECK(enclosed_volume(sch(1), 0.5) == 0.0);
  CHECK(enclosed_volume(sch(0), 1.7) == Approx(4.0 / 3.0 * pi * std::pow(1.7, 3)).epsilon(1e-14));
  CHECK(std::abs(enclosed_volume(sch(1), 2.0) / oracle::volume(1, 2.0) - 1.0) < 1e-10);
  for (double m : {0.5, 2.0}) {
    for (double f : {0.6, 1.5, 10.0, 300.0}) {
      CHECK(std::abs(enclosed_volume(sch(m), f * m) / oracle::volume(m, f * m) - 1.0) < 1e-10);
    }
  }
  // r-derivative is the volume density over the sphere.
  const double r = 3.0;
  const double fd = oracle::derivative([](double s) { return enclosed_volume(sch(1), s); }, r, 1e-4);
  CHECK(fd == Approx(4 * pi * r * r * std::pow(1 + 1 / (2 * r), 6)).epsilon(1e-8));
}

TEST_CASE("mean curvature of coordinate spheres") {
  CHECK(sphere_mean_curvature(sch(0), 4.0) == Approx(0.5).epsilon(1e-14));
  CHECK(sphere_mean_curvature(sch(1), 0.5) == Approx(0.0));
  CHECK(sphere_mean_curvature(sch(1), 2.0) == Approx(0.384).epsilon(1e-3));
  for (double m : {0.5, 1.0, 2.0}) {
    for (double f : {0.8, 2.0, 7.0}) {
      CHECK(sphere_mean_curvature(sch(m), f * m) ==
            Approx(oracle::mean_curvature(m, f * m)).epsilon(1e-8));
    }
  }
}

TEST_CASE("Hawking mass of coordinate spheres equals m") {
  CHECK(sphere_hawking_mass(sch(0), 3.0) == Approx(0.0));
  CHECK(sphere_hawking_mass(sch(1), 3.0) == Approx(1.0).epsilon(1e-14));
  CHECK(sphere_hawking_mass(sch(2), 1.0) == Approx(2.0).epsilon(1e-14));
  for (double m : {0.1, 1.0, 5.0}) {
    for (double f : {0.5, 0.51, 1.0, 100.0, 1e5}) {
      CHECK(std::abs(sphere_hawking_mass(sch(m), f * m) / m - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("asymptotic flatness ratios") {
  const std::vector<double> radii = {1.0, 10.0, 1e3};
  for (const auto& row : asymptotic_flatness_checks(sch(0), radii)) {
    CHECK(row.area_ratio == Approx(1.0).epsilon(1e-14));
    CHECK(row.isoperimetric_ratio == Approx(kSixSqrtPi).epsilon(1e-13));
  }
  const std::vector<double> far = {1e2, 1e3, 1e4};
  const auto rows = asymptotic_flatness_checks(sch(1), far);
  CHECK(rows[1].area_ratio == Approx(std::pow(1 + 1.0 / 2000, 4)).epsilon(1e-14));
  CHECK(rows[1].area_ratio == Approx(1.002).epsilon(1e-4));
  const double e2 = std::abs(rows[0].isoperimetric_ratio - kSixSqrtPi);
  const double e4 = std::abs(rows[2].isoperimetric_ratio - kSixSqrtPi);
  CHECK(e2 / e4 == Approx(100.0).epsilon(0.05));
}

TEST_CASE("monotonicity in r") {
  double prev_a = 0.0, prev_v = -1.0;
  for (double r = 0.5; r < 50.0; r *= 1.1) {
    const double a = sphere_area(sch(1), r), v = enclosed_volume(sch(1), r);
    CHECK(a > prev_a);
    CHECK(v > prev_v);
    prev_a = a;
    prev_v = v;
  }
}

TEST_CASE("scaling covariance") {
  for (double lambda : {0.25, 3.0, 17.0}) {
    for (double r : {0.6, 2.0, 9.0}) {
      const auto a = sphere_geometry(sch(1), r);
      const auto b = sphere_geometry(sch(lambda), lambda * r);
      CHECK(b.area == Approx(lambda * lambda * a.area).epsilon(1e-13));
      CHECK(b.enclosed_volume == Approx(std::pow(lambda, 3) * a.enclosed_volume).epsilon(1e-12));
      CHECK(b.mean_curvature == Approx(a.mean_curvature / lambda).epsilon(1e-13));
      CHECK(b.hawking_mass == Approx(lambda * a.hawking_mass).epsilon(1e-12));
    }
  }
}

TEST_CASE("conformal factor") {
  const auto g = sch(2);
  CHECK(g.conformal_factor(1.0) == Approx(2.0));
  CHECK(g.on_manifold(1.0));
  CHECK_FALSE(g.on_manifold(0.99));
  CHECK(g.log_factor_derivative(3.0) ==
        Approx(oracle::derivative([](double r) { return std::log(oracle::w(2, r)); }, 3.0, 1e-5))
            .epsilon(1e-8));
}
