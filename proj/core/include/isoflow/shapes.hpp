#pragma once

#include "isoflow/grid.hpp"

namespace isoflow {

/// Axisymmetric initial regions. All are centred on the axis; level-set
/// functions are negative inside and approximate a flat signed distance.
struct ShapeSpec {
  enum class Kind { sphere, dumbbell, oval };

  Kind kind = Kind::sphere;
  double r0 = 1.0;          ///< sphere radius
  double center_z = 0.0;    ///< sphere / oval centre on the axis
  double ball_radius = 1.0; ///< dumbbell end caps
  double neck_radius = 0.3; ///< dumbbell waist radius at z = 0
  double separation = 13.5; ///< dumbbell cap centre distance
  double flare = 0.5;       ///< derived: neck profile rho^2 = neck^2 + flare z^2
  double a = 1.0;           ///< oval semi-axis along rho
  double b = 1.0;           ///< oval semi-axis along z

  static ShapeSpec sphere(double r0, double center_z = 0.0);
  /// Hyperboloidal neck rho^2 = neck^2 + flare z^2 joined C^1 to two
  /// spherical caps whose centres sit at z = +-separation/2. The flare is
  /// derived from the three lengths and must land in (0, 1), which requires
  /// (separation/2)^2 > 2 (R^2 - neck^2). f(z)^2 then has second derivative
  /// <= 2 flare < 2, so the surface is strictly mean-convex.
  static ShapeSpec dumbbell(double ball_radius, double separation, double neck_radius);
  static ShapeSpec oval(double a, double b, double center_z = 0.0);

  double level_set(double rho, double z) const;

  /// Half-extents of the shape's bounding box (rho, |z - centre|).
  double extent_rho() const;
  double extent_z() const;

  /// Dumbbell joint height z1 and cap centre c (both positive).
  double neck_joint() const;
  double cap_center() const;
};

/// Grid sized to the shape with the requested margin (in cells) and filled.
AxiGrid make_grid(const ShapeSpec& shape, double h, int margin_cells = 8);

}  // namespace isoflow
