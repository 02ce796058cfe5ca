#include "isoflow/mass.hpp"

#include <algorithm>
#include <cmath>

#include "isoflow/errors.hpp"
#include "isoflow/profile.hpp"

namespace isoflow {

RegionSummary RegionSummary::from(double perimeter, double volume) {
  RegionSummary s;
  s.perimeter = perimeter;
  s.volume = volume;
  s.ratio = volume > 0.0 ? std::pow(perimeter, 1.5) / volume : 0.0;
  s.qlm = quasilocal_mass(perimeter, volume);
  return s;
}

RegionSummary RegionSummary::coordinate_ball(const AmbientMetric& metric, double r) {
  return from(sphere_area(metric, r), enclosed_volume(metric, r));
}

double quasilocal_mass(double perimeter, double volume) {
  if (!(perimeter > 0.0)) {
    throw DomainError("quasilocal_mass: perimeter must be positive");
  }
  return (2.0 / perimeter) * (volume - std::pow(perimeter, 1.5) / kSixSqrtPi);
}

std::vector<double> exhaustion_mass(const AmbientMetric& metric, std::span<const double> radii) {
  std::vector<double> out;
  out.reserve(radii.size());
  double previous = metric.horizon_radius();
  for (double r : radii) {
    if (!(r > previous)) {
      throw DomainError("exhaustion_mass: radii must increase and lie outside the horizon");
    }
    previous = r;
    out.push_back(RegionSummary::coordinate_ball(metric, r).qlm);
  }
  return out;
}

double check_iso_adm_bound(const RegionSummary& region, double m_adm, double c) {
  if (!(region.perimeter >= convexity_threshold(m_adm))) {
    throw DomainError("check_iso_adm_bound: perimeter must be at least 36 pi m_adm^2");
  }
  return m_adm + c / std::sqrt(region.perimeter) - region.qlm;
}

double fit_iso_adm_constant(const AmbientMetric& metric, std::span<const double> radii) {
  double c = 0.0;
  for (double r : radii) {
    const RegionSummary ball = RegionSummary::coordinate_ball(metric, r);
    c = std::max(c, (ball.qlm - metric.mass()) * std::sqrt(ball.perimeter));
  }
  return c;
}

double small_component_volume_limit(double c, double alpha, double ratio) {
  if (!(c > 0.0 && alpha > 0.0 && ratio > 0.0)) {
    throw DomainError("small_component_volume_bound: c, alpha and I must be positive");
  }
  return std::pow(alpha, 1.5) * ratio * ratio / (c * c * c);
}

bool small_component_volume_bound(double c, double alpha, double ratio, double volume) {
  return volume <= small_component_volume_limit(c, alpha, ratio);
}

UnionGap union_gap(const RegionSummary& w, const RegionSummary& omega) {
  UnionGap out;
  out.estimate_applies = omega.qlm > 0.0;
  const double joined = quasilocal_mass(w.perimeter + omega.perimeter, w.volume + omega.volume);
  out.gap = joined - omega.qlm;
  out.rescaled_deficit = -out.gap * std::sqrt(omega.perimeter);
  return out;
}

double hawking_mass(double area, double h_sq_integral) {
  if (!(area > 0.0)) {
    throw DomainError("hawking_mass: area must be positive");
  }
  const double sixteen_pi = 4.0 * kFourPi;
  return std::sqrt(area / sixteen_pi) * (1.0 - h_sq_integral / sixteen_pi);
}

}  // namespace isoflow
