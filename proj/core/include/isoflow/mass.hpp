#pragma once

#include <span>
#include <vector>

#include "isoflow/metric.hpp"

namespace isoflow {

/// Perimeter and volume of a region with the derived isoperimetric data.
struct RegionSummary {
  double perimeter = 0.0;
  double volume = 0.0;
  double ratio = 0.0;  ///< perimeter^{3/2} / volume
  double qlm = 0.0;    ///< quasilocal isoperimetric mass

  static RegionSummary from(double perimeter, double volume);
  static RegionSummary coordinate_ball(const AmbientMetric& metric, double r);
};

/// (2/P)(V - P^{3/2} / (6 sqrt(pi))). May be negative; never floored.
double quasilocal_mass(double perimeter, double volume);

/// Quasilocal masses of the coordinate balls B_r along an increasing radius list.
std::vector<double> exhaustion_mass(const AmbientMetric& metric, std::span<const double> radii);

/// Smallest C with qlm(B_r) <= m + C / sqrt(P(B_r)) over Schwarzschild
/// coordinate balls with m <= 2 and P >= 36 pi m^2, rounded up. The family
/// maximum sits at m = 2, r ~ 6.93 m and scales as m^2.
inline constexpr double kIsoAdmConstant = 53.99;

/// m_adm + C / sqrt(P) - qlm. Requires P >= 36 pi m_adm^2.
double check_iso_adm_bound(const RegionSummary& region, double m_adm, double c);

/// Smallest C >= 0 with qlm <= m + C / sqrt(P) over the given coordinate balls.
double fit_iso_adm_constant(const AmbientMetric& metric, std::span<const double> radii);

/// volume <= c^{-3} alpha^{3/2} I^2 for a union of components of perimeter <= alpha.
bool small_component_volume_bound(double c, double alpha, double ratio, double volume);
double small_component_volume_limit(double c, double alpha, double ratio);

struct UnionGap {
  double gap = 0.0;               ///< qlm(W u Omega) - qlm(Omega)
  double rescaled_deficit = 0.0;  ///< (qlm(Omega) - qlm(W u Omega)) sqrt(P(Omega))
  bool estimate_applies = true;   ///< false when qlm(Omega) <= 0
};

/// Effect of adjoining a disjoint region W to Omega on the quasilocal mass.
UnionGap union_gap(const RegionSummary& w, const RegionSummary& omega);

/// sqrt(A / 16 pi) (1 - int H^2 / 16 pi).
double hawking_mass(double area, double h_sq_integral);

}  // namespace isoflow
