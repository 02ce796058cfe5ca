#include "isoflow/shapes.hpp"

#include <algorithm>
#include <cmath>

#include "isoflow/errors.hpp"

namespace isoflow {

ShapeSpec ShapeSpec::sphere(double r0, double center_z) {
  if (!(r0 > 0.0)) throw DomainError("sphere: radius must be positive");
  ShapeSpec s;
  s.kind = Kind::sphere;
  s.r0 = r0;
  s.center_z = center_z;
  return s;
}

ShapeSpec ShapeSpec::dumbbell(double ball_radius, double separation, double neck_radius) {
  if (!(ball_radius > 0.0 && neck_radius > 0.0 && neck_radius < ball_radius)) {
    throw DomainError("dumbbell: need 0 < neck radius < ball radius");
  }
  const double c = 0.5 * separation;
  const double span = ball_radius * ball_radius - neck_radius * neck_radius;
  if (!(c * c > 2.0 * span)) {
    throw DomainError("dumbbell: separation too small for a mean-convex neck");
  }
  ShapeSpec s;
  s.kind = Kind::dumbbell;
  s.ball_radius = ball_radius;
  s.separation = separation;
  s.neck_radius = neck_radius;
  s.flare = span / (c * c - span);
  return s;
}

ShapeSpec ShapeSpec::oval(double a, double b, double center_z) {
  if (!(a > 0.0 && b > 0.0)) throw DomainError("oval: semi-axes must be positive");
  ShapeSpec s;
  s.kind = Kind::oval;
  s.a = a;
  s.b = b;
  s.center_z = center_z;
  return s;
}

// Matching f^2 = n^2 + flare z^2 to R^2 - (z - c)^2 in value and slope.
double ShapeSpec::neck_joint() const {
  return std::sqrt((ball_radius * ball_radius - neck_radius * neck_radius) /
                   (flare * (1.0 + flare)));
}

double ShapeSpec::cap_center() const { return 0.5 * separation; }

double ShapeSpec::level_set(double rho, double z) const {
  switch (kind) {
    case Kind::sphere:
      return std::hypot(rho, z - center_z) - r0;
    case Kind::oval: {
      const double q = std::hypot(rho / a, (z - center_z) / b);
      return (q - 1.0) * std::min(a, b);
    }
    case Kind::dumbbell: {
      const double az = std::abs(z);
      if (az >= neck_joint()) return std::hypot(rho, az - cap_center()) - ball_radius;
      return rho - std::sqrt(neck_radius * neck_radius + flare * z * z);
    }
  }
  return 0.0;
}

double ShapeSpec::extent_rho() const {
  switch (kind) {
    case Kind::sphere: return r0;
    case Kind::oval: return a;
    case Kind::dumbbell: return ball_radius;
  }
  return 0.0;
}

double ShapeSpec::extent_z() const {
  switch (kind) {
    case Kind::sphere: return r0;
    case Kind::oval: return b;
    case Kind::dumbbell: return cap_center() + ball_radius;
  }
  return 0.0;
}

AxiGrid make_grid(const ShapeSpec& shape, double h, int margin_cells) {
  const double pad = margin_cells * h;
  const double zc = shape.kind == ShapeSpec::Kind::dumbbell ? 0.0 : shape.center_z;
  // Snap z_min to a multiple of h so that z = 0 is a grid line.
  const double z_lo = std::floor((zc - shape.extent_z() - pad) / h) * h;
  const double z_hi = zc + shape.extent_z() + pad;
  AxiGrid grid(shape.extent_rho() + pad, z_lo, z_hi, h);
  grid.fill([&](double rho, double z) { return shape.level_set(rho, z); });
  return grid;
}

}  // namespace isoflow
