#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace isoflow {

/// Uniform node grid on the (rho, z) half-plane of an axisymmetric problem.
///
/// Column i = 0 is the symmetry axis. Values follow the level-set convention:
/// negative inside the region. Nodes are stored row-major in z, so the scan
/// order of a node is j * n_rho + i.
class AxiGrid {
 public:
  AxiGrid() = default;
  AxiGrid(double rho_max, double z_min, double z_max, double h);

  double h() const noexcept { return h_; }
  int n_rho() const noexcept { return n_rho_; }
  int n_z() const noexcept { return n_z_; }
  std::size_t size() const noexcept { return values_.size(); }
  double rho_max() const noexcept { return (n_rho_ - 1) * h_; }
  double z_min() const noexcept { return z_min_; }
  double z_max() const noexcept { return z_min_ + (n_z_ - 1) * h_; }

  double rho(int i) const noexcept { return i * h_; }
  double z(int j) const noexcept { return z_min_ + j * h_; }

  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_rho_) +
           static_cast<std::size_t>(i);
  }
  int col(std::size_t idx) const noexcept { return static_cast<int>(idx % n_rho_); }
  int row(std::size_t idx) const noexcept { return static_cast<int>(idx / n_rho_); }

  double& at(int i, int j) noexcept { return values_[index(i, j)]; }
  double at(int i, int j) const noexcept { return values_[index(i, j)]; }

  /// Value with the mirror ghost column rho = -h and clamped outer borders.
  double ghosted(int i, int j) const noexcept {
    if (i < 0) i = -i;
    if (i >= n_rho_) i = n_rho_ - 1;
    if (j < 0) j = 0;
    if (j >= n_z_) j = n_z_ - 1;
    return values_[index(i, j)];
  }

  std::vector<double>& values() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  bool is_border(int i, int j) const noexcept {
    return i == n_rho_ - 1 || j == 0 || j == n_z_ - 1;
  }

  /// Samples f(rho, z) at every node.
  template <class F>
  void fill(F&& f) {
    for (int j = 0; j < n_z_; ++j)
      for (int i = 0; i < n_rho_; ++i) at(i, j) = f(rho(i), z(j));
  }

 private:
  double z_min_ = 0.0;
  double h_ = 1.0;
  int n_rho_ = 0;
  int n_z_ = 0;
  std::vector<double> values_;
};

/// Central differences at a node, axis handled by the mirror ghost.
struct NodeDerivatives {
  double u_r = 0.0;
  double u_z = 0.0;
  double u_rr = 0.0;
  double u_zz = 0.0;
  double u_rz = 0.0;
};

NodeDerivatives node_derivatives(const AxiGrid& grid, int i, int j);

/// Gradient regularisation used inside every curvature evaluation.
inline constexpr double kGradientEpsilon = 1e-8;

/// kappa |grad u|, where kappa is the flat mean curvature (sum of principal
/// curvatures) of the level set of the revolved field through the node.
double curvature_times_gradient(const NodeDerivatives& d, double rho);

/// Flat mean curvature div(grad u / |grad u|) of the revolved level sets.
double flat_curvature(const AxiGrid& grid, int i, int j);

}  // namespace isoflow
