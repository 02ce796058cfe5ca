#include "isoflow/profile.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "isoflow/errors.hpp"
#include "isoflow/metric.hpp"

namespace isoflow {

namespace {

void require_mass(double m) {
  if (!(m >= 0.0) || !std::isfinite(m)) {
    throw DomainError("profile: mass must be finite and >= 0");
  }
}

void require_area(double m, double area, bool strict) {
  require_mass(m);
  const double floor = horizon_area(m);
  // Areas of spheres at the horizon may land an ulp or two below 16 pi m^2.
  const bool ok = strict ? area > floor : area >= floor * (1.0 - 1e-12);
  if (!ok || !std::isfinite(area)) {
    std::ostringstream os;
    os << "profile: area " << area << " is below the horizon area " << floor;
    throw DomainError(os.str());
  }
}

}  // namespace

double horizon_area(double m) { return 4.0 * kFourPi * m * m; }

double convexity_threshold(double m) {
  require_mass(m);
  return 9.0 * kFourPi * m * m;
}

double convexity_radius(double m) { return (1.0 + 0.5 * std::sqrt(3.0)) * m; }

double radius_from_area(double m, double area) {
  require_area(m, area, false);
  // sqrt(A / 4 pi) = r w^2 = (r + a)^2 / r with a = m/2, so r solves
  // r^2 + (2a - s) r + a^2 = 0; the outer root is the one with r >= a.
  const double a = 0.5 * m;
  const double s = std::sqrt(area / kFourPi);
  const double disc = std::max(0.0, s * (s - 4.0 * a));
  const double b = s - 2.0 * a;
  return std::max(0.5 * (b + std::sqrt(disc)), a);
}

double phi(double m, double area) {
  const double r = radius_from_area(m, area);
  return enclosed_volume(AmbientMetric::schwarzschild(m), r);
}

double dphi_dA(double m, double area) {
  require_area(m, area, true);
  const double r = radius_from_area(m, area);
  const double x = m / (2.0 * r);
  if (!(x < 1.0)) {
    return std::numeric_limits<double>::infinity();
  }
  const double w = 1.0 + x;
  return w * w * w * r / (2.0 * (1.0 - x));
}

double convexity_sign_expression(double m, double r) {
  return 1.0 - 2.0 * m / r + m * m / (4.0 * r * r);
}

Curvature curvature_at(double m, double area) {
  require_area(m, area, true);
  if (m == 0.0) {
    return Curvature::convex;
  }
  const double threshold = convexity_threshold(m);
  if (area == threshold) {
    return Curvature::flat;
  }
  const double s = convexity_sign_expression(m, radius_from_area(m, area));
  return s < 0.0 ? Curvature::concave : Curvature::convex;
}

ProfilePoint profile_point(double m, double area) {
  ProfilePoint p;
  p.m = m;
  p.area = area;
  p.r = radius_from_area(m, area);
  p.phi = phi(m, area);
  if (area > horizon_area(m)) {
    p.dphi_dA = dphi_dA(m, area);
    p.curvature = curvature_at(m, area);
  } else {
    p.dphi_dA = std::numeric_limits<double>::infinity();
    p.curvature = m > 0.0 ? Curvature::concave : Curvature::flat;
  }
  return p;
}

double locate_convexity_threshold(double m) {
  require_mass(m);
  if (m == 0.0) {
    return 0.0;
  }
  // The sign expression is negative just outside the horizon and tends to 1.
  double lo = 0.5 * m * (1.0 + 1e-12);
  double hi = 4.0 * m;
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (convexity_sign_expression(m, mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return sphere_area(AmbientMetric::schwarzschild(m), 0.5 * (lo + hi));
}

double mass_from_region(double area, double volume) {
  if (!(area > 0.0)) {
    throw DomainError("mass_from_region: area must be positive");
  }
  return (2.0 / area) * (volume - std::pow(area, 1.5) / kSixSqrtPi);
}

double superadditivity_gap(double m, double gamma, std::span<const double> a,
                           std::span<const double> b) {
  require_mass(m);
  if (!(gamma >= 0.0)) {
    throw DomainError("superadditivity_gap: gamma must be >= 0");
  }
  if (a.size() != b.size() || a.empty()) {
    throw DomainError("superadditivity_gap: area lists must be non-empty and of equal length");
  }
  const double threshold = convexity_threshold(m);
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!(a[k] >= b[k] && b[k] >= threshold)) {
      throw DomainError("superadditivity_gap: requires a_k >= b_k >= 36 pi m^2");
    }
  }
  auto side = [&](std::span<const double> xs) {
    const double total = std::accumulate(xs.begin(), xs.end(), gamma);
    double sum_phi = 0.0;
    for (double x : xs) sum_phi += phi(m, x);
    return phi(m, total) - sum_phi;
  };
  return side(a) - side(b);
}

double ratio_slope_term(double m, double area) {
  return phi(m, area) - (2.0 / 3.0) * area * dphi_dA(m, area);
}

}  // namespace isoflow
