#pragma once

#include <array>
#include <numbers>
#include <span>
#include <vector>

namespace isoflow {

/// Conformally flat 3-metric g = w(x)^4 * delta centred at the origin.
///
/// Euclidean space is the Schwarzschild family with m = 0, so both kinds share
/// the conformal factor w(r) = 1 + m / (2r). Area, volume and length densities
/// relative to the flat metric are w^4, w^6 and w^2.
class AmbientMetric {
 public:
  enum class Kind { euclidean, schwarzschild };

  static AmbientMetric euclidean() { return AmbientMetric(Kind::euclidean, 0.0); }
  static AmbientMetric schwarzschild(double m);

  Kind kind() const noexcept { return kind_; }
  double mass() const noexcept { return m_; }
  double horizon_radius() const noexcept { return 0.5 * m_; }

  double conformal_factor(double r) const noexcept { return 1.0 + m_ / (2.0 * r); }

  /// d(ln w)/dr, the radial log-derivative of the conformal factor.
  double log_factor_derivative(double r) const noexcept {
    return -m_ / (2.0 * r * r) / conformal_factor(r);
  }

  /// True for points outside the horizon, i.e. on the computational manifold.
  bool on_manifold(double r) const noexcept { return r >= horizon_radius(); }

 private:
  AmbientMetric(Kind kind, double m) : kind_(kind), m_(m) {}

  Kind kind_;
  double m_;
};

/// Closed-form data of the centred coordinate sphere of radius r.
struct SphereGeometry {
  double r = 0.0;
  double area = 0.0;
  double enclosed_volume = 0.0;
  double mean_curvature = 0.0;
  double hawking_mass = 0.0;
};

double sphere_area(const AmbientMetric& metric, double r);
double sphere_area_derivative(const AmbientMetric& metric, double r);

/// g-volume between the horizon r = m/2 and the sphere of radius r.
double enclosed_volume(const AmbientMetric& metric, double r);

/// g-mean curvature of the coordinate sphere, 2(1 - m/2r) / (r (1 + m/2r)^3).
double sphere_mean_curvature(const AmbientMetric& metric, double r);

double sphere_hawking_mass(const AmbientMetric& metric, double r);

SphereGeometry sphere_geometry(const AmbientMetric& metric, double r);

struct FlatnessRow {
  double r = 0.0;
  double area_ratio = 0.0;       ///< |S_r| / (4 pi r^2), tends to 1.
  double isoperimetric_ratio = 0.0;  ///< |S_r|^{3/2} / |B_r|, tends to 6 sqrt(pi).
};

/// Tabulates the two asymptotic-flatness ratios of coordinate spheres.
std::vector<FlatnessRow> asymptotic_flatness_checks(const AmbientMetric& metric,
                                                    std::span<const double> radii);

inline constexpr double kFourPi = 4.0 * std::numbers::pi;
inline constexpr double kSixSqrtPi = 6.0 * 1.7724538509055160273;  // 6 sqrt(pi)

}  // namespace isoflow
