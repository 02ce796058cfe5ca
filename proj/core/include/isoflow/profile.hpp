#pragma once

#include <span>

namespace isoflow {

/// Sign of the second derivative of the Schwarzschild isoperimetric profile.
enum class Curvature { concave = -1, flat = 0, convex = 1 };

/// One evaluation of the profile A -> phi_m(A), the exterior volume enclosed
/// by the centred sphere of area A in the Schwarzschild space of mass m.
struct ProfilePoint {
  double m = 0.0;
  double area = 0.0;
  double r = 0.0;
  double phi = 0.0;
  double dphi_dA = 0.0;  ///< +inf on the horizon.
  Curvature curvature = Curvature::flat;
};

/// Horizon area 16 pi m^2, the smallest admissible argument of the profile.
double horizon_area(double m);

/// Area 36 pi m^2 at which the profile switches from concave to convex.
double convexity_threshold(double m);

/// Radius (1 + sqrt(3)/2) m at which the profile switches convexity.
double convexity_radius(double m);

/// Inverts A = 4 pi r^2 (1 + m/2r)^4 for the unique r >= m/2.
double radius_from_area(double m, double area);

double phi(double m, double area);
double dphi_dA(double m, double area);

/// Quadratic factor 1 - 2m/r + m^2/(4 r^2) carrying the sign of phi''.
double convexity_sign_expression(double m, double r);

Curvature curvature_at(double m, double area);

ProfilePoint profile_point(double m, double area);

/// Locates the convexity threshold by bracketed root finding on the sign
/// expression (in r), then maps it back to an area.
double locate_convexity_threshold(double m);

/// (2/A)(V - A^{3/2} / (6 sqrt(pi))), the mass read off a region of area A and volume V.
double mass_from_region(double area, double volume);

/// [phi(g + sum a) - sum phi(a)] - [phi(g + sum b) - sum phi(b)].
/// Non-negative whenever a_k >= b_k >= 36 pi m^2 and gamma >= 0.
double superadditivity_gap(double m, double gamma, std::span<const double> a,
                           std::span<const double> b);

/// phi(A) - (2/3) A phi'(A). Positive for A >= 36 pi m^2, which makes the
/// ratio A^{3/2} / (a + phi(A)) increasing there for every a >= 0.
double ratio_slope_term(double m, double area);

}  // namespace isoflow
