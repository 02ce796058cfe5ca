#include "isoflow/metric.hpp"

#include <cmath>
#include <sstream>

#include "isoflow/errors.hpp"

namespace isoflow {

namespace {

void require_outside_horizon(const AmbientMetric& metric, double r, const char* what) {
  if (!(r >= metric.horizon_radius()) || !std::isfinite(r)) {
    std::ostringstream os;
    os << what << ": radius " << r << " lies inside the horizon r = " << metric.horizon_radius();
    throw DomainError(os.str());
  }
}

// int_1^s (t + 1)^6 / t^4 dt, the volume integral in the scaled variable
// s = rho / a. Near s = 1 the closed-form antiderivative cancels to a few ulps
// of its constant terms, so short intervals use 8-point Gauss-Legendre instead.
double scaled_volume_primitive(double s) {
  if (s - 1.0 < 0.05) {
    static constexpr double x[4] = {0.1834346424956498, 0.5255324099163290,
                                    0.7966664774136267, 0.9602898564975363};
    static constexpr double wt[4] = {0.3626837833783620, 0.3137066458778873,
                                     0.2223810344533745, 0.1012285362903763};
    const double half = 0.5 * (s - 1.0), mid = 0.5 * (s + 1.0);
    auto f = [](double t) {
      const double q = (t + 1.0) * (t + 1.0) * (t + 1.0);
      return q * q / (t * t * t * t);
    };
    double sum = 0.0;
    for (int k = 0; k < 4; ++k) sum += wt[k] * (f(mid - half * x[k]) + f(mid + half * x[k]));
    return half * sum;
  }
  const double inv = 1.0 / s;
  return s * s * s / 3.0 + 3.0 * s * s + 15.0 * s + 20.0 * std::log(s) -
         15.0 * inv - 3.0 * inv * inv - inv * inv * inv / 3.0;
}

}  // namespace

AmbientMetric AmbientMetric::schwarzschild(double m) {
  if (!(m >= 0.0) || !std::isfinite(m)) {
    throw DomainError("schwarzschild metric requires a finite mass m >= 0");
  }
  return AmbientMetric(m == 0.0 ? Kind::euclidean : Kind::schwarzschild, m);
}

double sphere_area(const AmbientMetric& metric, double r) {
  require_outside_horizon(metric, r, "sphere_area");
  const double w = metric.conformal_factor(r);
  return kFourPi * r * r * (w * w) * (w * w);
}

double sphere_area_derivative(const AmbientMetric& metric, double r) {
  require_outside_horizon(metric, r, "sphere_area_derivative");
  const double x = metric.mass() / (2.0 * r);
  const double w = 1.0 + x;
  return 2.0 * kFourPi * r * w * w * w * (1.0 - x);
}

double enclosed_volume(const AmbientMetric& metric, double r) {
  require_outside_horizon(metric, r, "enclosed_volume");
  const double a = metric.horizon_radius();
  if (a == 0.0) {
    return kFourPi * r * r * r / 3.0;
  }
  // 4 pi int_a^r rho^2 (1 + a/rho)^6 d rho, expanded binomially.
  return kFourPi * a * a * a * scaled_volume_primitive(r / a);
}

double sphere_mean_curvature(const AmbientMetric& metric, double r) {
  require_outside_horizon(metric, r, "sphere_mean_curvature");
  const double x = metric.mass() / (2.0 * r);
  const double w = 1.0 + x;
  return 2.0 * (1.0 - x) / (r * w * w * w);
}

double sphere_hawking_mass(const AmbientMetric& metric, double r) {
  const double area = sphere_area(metric, r);
  // 1 - A H^2 / 16 pi = 1 - ((1 - x) / w)^2 with x = m / 2r; factored as a
  // difference of squares so large radii do not lose digits to cancellation.
  const double x = metric.mass() / (2.0 * r);
  const double w = 1.0 + x;
  const double deficit = (w - (1.0 - x)) * (w + (1.0 - x)) / (w * w);
  return std::sqrt(area / (4.0 * kFourPi)) * deficit;
}

SphereGeometry sphere_geometry(const AmbientMetric& metric, double r) {
  return SphereGeometry{r, sphere_area(metric, r), enclosed_volume(metric, r),
                        sphere_mean_curvature(metric, r), sphere_hawking_mass(metric, r)};
}

std::vector<FlatnessRow> asymptotic_flatness_checks(const AmbientMetric& metric,
                                                    std::span<const double> radii) {
  std::vector<FlatnessRow> rows;
  rows.reserve(radii.size());
  for (double r : radii) {
    if (!(r > metric.horizon_radius())) {
      throw DomainError("asymptotic_flatness_checks: radii must lie strictly outside the horizon");
    }
    const double area = sphere_area(metric, r);
    rows.push_back({r, area / (kFourPi * r * r), std::pow(area, 1.5) / enclosed_volume(metric, r)});
  }
  return rows;
}

}  // namespace isoflow
