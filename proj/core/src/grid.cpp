#include "isoflow/grid.hpp"

#include <cmath>

#include "isoflow/errors.hpp"

namespace isoflow {

AxiGrid::AxiGrid(double rho_max, double z_min, double z_max, double h) : z_min_(z_min), h_(h) {
  if (!(h > 0.0) || !(rho_max > 0.0) || !(z_max > z_min)) {
    throw DomainError("AxiGrid: need h > 0, rho_max > 0 and z_max > z_min");
  }
  n_rho_ = static_cast<int>(std::ceil(rho_max / h - 1e-9)) + 1;
  n_z_ = static_cast<int>(std::ceil((z_max - z_min) / h - 1e-9)) + 1;
  if (n_rho_ < 4 || n_z_ < 4) {
    throw DomainError("AxiGrid: at least four nodes are required in each direction");
  }
  values_.assign(static_cast<std::size_t>(n_rho_) * static_cast<std::size_t>(n_z_), 1.0);
}

NodeDerivatives node_derivatives(const AxiGrid& g, int i, int j) {
  const double h = g.h();
  const double c = g.ghosted(i, j);
  const double e = g.ghosted(i + 1, j);
  const double w = g.ghosted(i - 1, j);
  const double n = g.ghosted(i, j + 1);
  const double s = g.ghosted(i, j - 1);
  NodeDerivatives d;
  d.u_r = (e - w) / (2.0 * h);
  d.u_z = (n - s) / (2.0 * h);
  d.u_rr = (e - 2.0 * c + w) / (h * h);
  d.u_zz = (n - 2.0 * c + s) / (h * h);
  d.u_rz = (g.ghosted(i + 1, j + 1) - g.ghosted(i - 1, j + 1) - g.ghosted(i + 1, j - 1) +
            g.ghosted(i - 1, j - 1)) /
           (4.0 * h * h);
  return d;
}

double curvature_times_gradient(const NodeDerivatives& d, double rho) {
  const double eps2 = kGradientEpsilon * kGradientEpsilon;
  const double g2 = d.u_r * d.u_r + d.u_z * d.u_z + eps2;
  const double meridian =
      (d.u_rr * d.u_z * d.u_z - 2.0 * d.u_r * d.u_z * d.u_rz + d.u_zz * d.u_r * d.u_r) / g2;
  // Azimuthal principal direction: u_r / rho, which tends to u_rr on the axis.
  const double azimuthal = rho > 0.0 ? d.u_r / rho : d.u_rr;
  return meridian + azimuthal;
}

double flat_curvature(const AxiGrid& grid, int i, int j) {
  const NodeDerivatives d = node_derivatives(grid, i, j);
  const double norm = std::sqrt(d.u_r * d.u_r + d.u_z * d.u_z +
                                kGradientEpsilon * kGradientEpsilon);
  return curvature_times_gradient(d, grid.rho(i)) / norm;
}

}  // namespace isoflow
