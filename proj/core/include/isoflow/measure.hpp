#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "isoflow/grid.hpp"
#include "isoflow/metric.hpp"

namespace isoflow {

/// 4-connected labelling of the region {values < 0}.
struct ComponentSet {
  static constexpr int kOutside = -1;

  struct Component {
    int label = 0;
    std::size_t first_node = 0;  ///< minimal scan-order node
    std::vector<std::size_t> nodes;
  };

  std::vector<int> labels;  ///< per node, kOutside or an index into components
  std::vector<Component> components;

  std::size_t size() const noexcept { return components.size(); }
  bool empty() const noexcept { return components.empty(); }
};

ComponentSet extract_components(const AxiGrid& grid);

/// Number of 4-connected components only, without storing node lists.
std::size_t count_components(const AxiGrid& grid);

struct Point {
  double rho = 0.0;
  double z = 0.0;
};

/// One marching-squares segment. Endpoints are stored in cell-local
/// coordinates (0..1 along each axis) so that geometry is exactly invariant
/// under whole-cell translations.
struct Segment {
  int ci = 0;
  int cj = 0;
  Point a;  ///< local
  Point b;  ///< local
  std::int64_t edge_a = 0;
  std::int64_t edge_b = 0;
  int label = ComponentSet::kOutside;
};

struct Polyline {
  std::vector<Point> points;  ///< world coordinates
  bool closed = false;
};

/// All zero-set segments, each tagged with the label of the component it bounds.
/// Saddle cells join their two inside corners only when the bilinear centre
/// value is negative and both corners carry the same label.
std::vector<Segment> contour_segments(const AxiGrid& grid, const ComponentSet& components);

/// Chains the segments of one component into polylines. Curves of a region that
/// touches the axis end on it; the revolution closes them.
std::vector<Polyline> interface_contour(const AxiGrid& grid, const ComponentSet& components,
                                        int label);

Point segment_world(const AxiGrid& grid, const Segment& s, bool first);

/// g-area of the surface obtained by revolving the polyline about the axis.
double g_perimeter(const AmbientMetric& metric, const Polyline& polyline);
double g_perimeter(const AmbientMetric& metric, const AxiGrid& grid,
                   const std::vector<Segment>& segments, int label);

/// g-volume of one component. Nodes inside the horizon contribute nothing.
double g_volume(const AmbientMetric& metric, const AxiGrid& grid, const ComponentSet& components,
                int label);

/// int H_g^2 dA_g over a revolved polyline, with H_g interpolated from the
/// level-set curvature of the grid.
double interface_h_sq(const AmbientMetric& metric, const AxiGrid& grid, const Polyline& polyline);

struct ComponentMeasure {
  int label = 0;
  std::size_t first_node = 0;
  double perimeter = 0.0;
  double volume = 0.0;
  double h_sq_integral = 0.0;
  double flat_length = 0.0;     ///< Euclidean length of the meridian contour
  std::size_t curve_count = 0;  ///< closed or axis-terminated contour curves
  std::vector<std::size_t> cells;
};

struct MeasureOptions {
  bool with_h_sq = true;
  bool with_curves = true;
  bool with_volume = true;
};

/// Perimeter, volume and int H^2 of every component in one pass.
std::vector<ComponentMeasure> measure_components(const AmbientMetric& metric, const AxiGrid& grid,
                                                 const ComponentSet& components,
                                                 const MeasureOptions& options = {});

/// Mean-curvature sample of the revolved level set through a world point.
double g_mean_curvature_at(const AmbientMetric& metric, const AxiGrid& grid, Point p);

}  // namespace isoflow
