#include "isoflow/measure.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <unordered_map>

namespace isoflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct LocalPolygon {
  std::array<Point, 8> v{};
  int n = 0;
  int label = ComponentSet::kOutside;
  void push(Point p) { v[static_cast<std::size_t>(n++)] = p; }
};

// Marching-squares output of a single cell.
struct CellGeometry {
  std::array<Segment, 2> segments{};
  int n_segments = 0;
  std::array<LocalPolygon, 2> polygons{};
  int n_polygons = 0;
};

constexpr std::array<Point, 4> kCorner = {Point{0, 0}, Point{1, 0}, Point{1, 1}, Point{0, 1}};

class CellWalker {
 public:
  CellWalker(const AxiGrid& grid, const std::vector<int>& labels) : g_(grid), labels_(labels) {}

  CellGeometry operator()(int i, int j) const {
    CellGeometry out;
    const std::array<std::size_t, 4> node = {g_.index(i, j), g_.index(i + 1, j),
                                             g_.index(i + 1, j + 1), g_.index(i, j + 1)};
    std::array<double, 4> val{};
    std::array<bool, 4> in{};
    int n_in = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      val[k] = g_.values()[node[k]];
      in[k] = val[k] < 0.0;
      n_in += in[k] ? 1 : 0;
    }
    if (n_in == 0) return out;

    const std::array<std::int64_t, 4> edge_id = {
        2 * static_cast<std::int64_t>(g_.index(i, j)),
        2 * static_cast<std::int64_t>(g_.index(i + 1, j)) + 1,
        2 * static_cast<std::int64_t>(g_.index(i, j + 1)),
        2 * static_cast<std::int64_t>(g_.index(i, j)) + 1};

    struct Crossing {
      Point p;
      std::int64_t key;
    };
    auto crossing = [&](std::size_t k) {
      const std::size_t k1 = (k + 1) % 4;
      const std::size_t pin = in[k] ? k : k1;
      const std::size_t pout = in[k] ? k1 : k;
      const double vp = val[pin];
      const double vq = val[pout];
      const double t = vp / (vp - vq);
      const Point a = kCorner[pin];
      const Point b = kCorner[pout];
      Crossing c{{a.rho + t * (b.rho - a.rho), a.z + t * (b.z - a.z)}, edge_id[k]};
      // A zero-valued outside node is shared by several edges; key it by node.
      if (vq == 0.0) c.key = -1 - static_cast<std::int64_t>(node[pout]);
      return c;
    };
    auto add_segment = [&](std::size_t e0, std::size_t e1, int label) {
      const Crossing c0 = crossing(e0);
      const Crossing c1 = crossing(e1);
      if (c0.key == c1.key) return;  // both ends on one zero-valued node
      Segment& s = out.segments[static_cast<std::size_t>(out.n_segments++)];
      s = Segment{i, j, c0.p, c1.p, c0.key, c1.key, label};
    };
    auto label_of = [&](std::size_t k) { return labels_[node[k]]; };

    if (n_in == 4) {
      LocalPolygon& poly = out.polygons[static_cast<std::size_t>(out.n_polygons++)];
      for (const Point& c : kCorner) poly.push(c);
      poly.label = label_of(0);
      return out;
    }

    const bool saddle = n_in == 2 && in[0] == in[2];
    if (saddle) {
      const std::size_t a = in[0] ? 0 : 1;
      const std::size_t b = a + 2;
      const double centre = 0.25 * (val[0] + val[1] + val[2] + val[3]);
      const bool joined = centre < 0.0 && label_of(a) == label_of(b);
      if (joined) {
        const int label = label_of(a);
        for (std::size_t k : {(a + 1) % 4, (a + 3) % 4}) {  // outside corners
          add_segment((k + 3) % 4, k, label);
        }
        LocalPolygon& poly = out.polygons[static_cast<std::size_t>(out.n_polygons++)];
        poly.label = label;
        for (std::size_t k = 0; k < 4; ++k) {
          if (in[k]) poly.push(kCorner[k]);
          if (in[k] != in[(k + 1) % 4]) poly.push(crossing(k).p);
        }
      } else {
        for (std::size_t k : {a, b}) {
          add_segment((k + 3) % 4, k, label_of(k));
          LocalPolygon& poly = out.polygons[static_cast<std::size_t>(out.n_polygons++)];
          poly.label = label_of(k);
          poly.push(crossing((k + 3) % 4).p);
          poly.push(kCorner[k]);
          poly.push(crossing(k).p);
        }
      }
      return out;
    }

    int label = ComponentSet::kOutside;
    std::array<std::size_t, 2> crossed{};
    int n_crossed = 0;
    LocalPolygon& poly = out.polygons[static_cast<std::size_t>(out.n_polygons++)];
    for (std::size_t k = 0; k < 4; ++k) {
      if (in[k]) {
        poly.push(kCorner[k]);
        label = label_of(k);
      }
      if (in[k] != in[(k + 1) % 4]) {
        poly.push(crossing(k).p);
        crossed[static_cast<std::size_t>(n_crossed++)] = k;
      }
    }
    poly.label = label;
    add_segment(crossed[0], crossed[1], label);
    return out;
  }

 private:
  const AxiGrid& g_;
  const std::vector<int>& labels_;
};

Point to_world(const AxiGrid& g, int ci, int cj, Point local) {
  return {(ci + local.rho) * g.h(), g.z_min() + (cj + local.z) * g.h()};
}

double radius_of(Point p) { return std::sqrt(p.rho * p.rho + p.z * p.z); }

double area_density(const AmbientMetric& metric, Point p) {
  if (metric.mass() == 0.0) return 1.0;
  const double w = metric.conformal_factor(radius_of(p));
  return (w * w) * (w * w);
}

// 2 pi rho w^6 on the manifold, zero inside the horizon.
double volume_density(const AmbientMetric& metric, Point p) {
  if (metric.mass() == 0.0) return kTwoPi * p.rho;
  const double r = radius_of(p);
  if (!metric.on_manifold(r)) return 0.0;
  const double w = metric.conformal_factor(r);
  const double w3 = w * w * w;
  return kTwoPi * p.rho * w3 * w3;
}

double triangle_area(Point a, Point b, Point c) {
  return 0.5 * std::abs((b.rho - a.rho) * (c.z - a.z) - (c.rho - a.rho) * (b.z - a.z));
}

Point mid(Point a, Point b) { return {0.5 * (a.rho + b.rho), 0.5 * (a.z + b.z)}; }

double smooth_triangle_integral(const AmbientMetric& metric, Point a, Point b, Point c,
                                double area) {
  if (area == 0.0) return 0.0;
  return area / 3.0 *
         (volume_density(metric, mid(a, b)) + volume_density(metric, mid(b, c)) +
          volume_density(metric, mid(c, a)));
}

// Triangles cut by the horizon: refine uniformly, centroid rule.
double refined_triangle_integral(const AmbientMetric& metric, Point a, Point b, Point c,
                                 int depth) {
  if (depth == 0) {
    const Point centroid{(a.rho + b.rho + c.rho) / 3.0, (a.z + b.z + c.z) / 3.0};
    return triangle_area(a, b, c) * volume_density(metric, centroid);
  }
  const Point ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
  return refined_triangle_integral(metric, a, ab, ca, depth - 1) +
         refined_triangle_integral(metric, ab, b, bc, depth - 1) +
         refined_triangle_integral(metric, ca, bc, c, depth - 1) +
         refined_triangle_integral(metric, ab, bc, ca, depth - 1);
}

enum class HorizonRelation { outside, straddles, inside };

HorizonRelation classify_cell(const AmbientMetric& metric, const AxiGrid& g, int i, int j) {
  const double a = metric.horizon_radius();
  if (a == 0.0) return HorizonRelation::outside;
  const double r0 = g.rho(i), r1 = g.rho(i + 1), z0 = g.z(j), z1 = g.z(j + 1);
  const double nr = std::clamp(0.0, r0, r1);
  const double nz = std::clamp(0.0, z0, z1);
  if (nr * nr + nz * nz >= a * a) return HorizonRelation::outside;
  const double fr = std::max(std::abs(r0), std::abs(r1));
  const double fz = std::max(std::abs(z0), std::abs(z1));
  if (fr * fr + fz * fz <= a * a) return HorizonRelation::inside;
  return HorizonRelation::straddles;
}

double polygon_volume(const AmbientMetric& metric, const AxiGrid& g, int i, int j,
                      const LocalPolygon& poly) {
  const HorizonRelation rel = classify_cell(metric, g, i, j);
  if (rel == HorizonRelation::inside || poly.n < 3) return 0.0;
  double sum = 0.0;
  const Point p0 = to_world(g, i, j, poly.v[0]);
  const double cell_area = g.h() * g.h();
  for (int k = 1; k + 1 < poly.n; ++k) {
    const auto& l1 = poly.v[static_cast<std::size_t>(k)];
    const auto& l2 = poly.v[static_cast<std::size_t>(k + 1)];
    const Point p1 = to_world(g, i, j, l1);
    const Point p2 = to_world(g, i, j, l2);
    // Areas from local coordinates keep the result exact under whole-cell shifts.
    sum += rel == HorizonRelation::outside
               ? smooth_triangle_integral(metric, p0, p1, p2,
                                          cell_area * triangle_area(poly.v[0], l1, l2))
               : refined_triangle_integral(metric, p0, p1, p2, 4);
  }
  return sum;
}

double segment_perimeter(const AmbientMetric& metric, const AxiGrid& g, const Segment& s) {
  const Point a = to_world(g, s.ci, s.cj, s.a);
  const Point b = to_world(g, s.ci, s.cj, s.b);
  const Point m = mid(a, b);
  if (metric.mass() > 0.0 && !metric.on_manifold(radius_of(m))) return 0.0;
  const double len = g.h() * std::hypot(s.a.rho - s.b.rho, s.a.z - s.b.z);
  return kTwoPi * m.rho * len * area_density(metric, m);
}

// H_g at a point given both in cell-local coordinates (for interpolation
// weights) and in world coordinates (for the metric).
double curvature_in_cell(const AmbientMetric& metric, const AxiGrid& grid, int i, int j,
                         Point local, Point p) {
  const double tx = local.rho, tz = local.z;
  double kappa = 0.0, gr = 0.0, gz = 0.0;
  for (int dj = 0; dj < 2; ++dj) {
    for (int di = 0; di < 2; ++di) {
      const double wgt = (di ? tx : 1.0 - tx) * (dj ? tz : 1.0 - tz);
      const NodeDerivatives d = node_derivatives(grid, i + di, j + dj);
      const double norm =
          std::sqrt(d.u_r * d.u_r + d.u_z * d.u_z + kGradientEpsilon * kGradientEpsilon);
      kappa += wgt * curvature_times_gradient(d, grid.rho(i + di)) / norm;
      gr += wgt * d.u_r;
      gz += wgt * d.u_z;
    }
  }
  if (metric.mass() == 0.0) return kappa;
  const double r = radius_of(p);
  const double w = metric.conformal_factor(r);
  const double gnorm = std::sqrt(gr * gr + gz * gz + kGradientEpsilon * kGradientEpsilon);
  const double normal_radial = r > 0.0 ? (gr * p.rho + gz * p.z) / (gnorm * r) : 0.0;
  return (kappa + 4.0 * normal_radial * metric.log_factor_derivative(r)) / (w * w);
}

double segment_h_sq(const AmbientMetric& metric, const AxiGrid& g, const Segment& s) {
  const Point a = to_world(g, s.ci, s.cj, s.a);
  const Point b = to_world(g, s.ci, s.cj, s.b);
  const Point m = mid(a, b);
  if (metric.mass() > 0.0 && !metric.on_manifold(radius_of(m))) return 0.0;
  const double len = g.h() * std::hypot(s.a.rho - s.b.rho, s.a.z - s.b.z);
  const double hg = curvature_in_cell(metric, g, s.ci, s.cj, mid(s.a, s.b), m);
  return hg * hg * kTwoPi * m.rho * len * area_density(metric, m);
}

double segment_h_sq(const AmbientMetric& metric, const AxiGrid& g, Point a, Point b) {
  const Point m = mid(a, b);
  if (metric.mass() > 0.0 && !metric.on_manifold(radius_of(m))) return 0.0;
  const double len = std::hypot(a.rho - b.rho, a.z - b.z);
  const double hg = g_mean_curvature_at(metric, g, m);
  return hg * hg * kTwoPi * m.rho * len * area_density(metric, m);
}

std::vector<Polyline> chain(const AxiGrid& g, const std::vector<const Segment*>& segs) {
  std::unordered_map<std::int64_t, std::array<int, 2>> ends;
  ends.reserve(segs.size() * 2);
  auto attach = [&](std::int64_t key, int s) {
    auto [it, fresh] = ends.try_emplace(key, std::array<int, 2>{-1, -1});
    auto& slot = it->second;
    if (slot[0] < 0) slot[0] = s;
    else if (slot[1] < 0) slot[1] = s;
  };
  for (std::size_t s = 0; s < segs.size(); ++s) {
    attach(segs[s]->edge_a, static_cast<int>(s));
    attach(segs[s]->edge_b, static_cast<int>(s));
  }
  std::vector<bool> used(segs.size(), false);
  std::vector<Polyline> lines;

  auto walk = [&](int start, std::int64_t from_key) {
    Polyline line;
    int cur = start;
    std::int64_t key = from_key;
    const Segment* s0 = segs[static_cast<std::size_t>(start)];
    line.points.push_back(
        to_world(g, s0->ci, s0->cj, s0->edge_a == from_key ? s0->a : s0->b));
    while (cur >= 0 && !used[static_cast<std::size_t>(cur)]) {
      used[static_cast<std::size_t>(cur)] = true;
      const Segment* s = segs[static_cast<std::size_t>(cur)];
      const bool forward = s->edge_a == key;
      const std::int64_t next_key = forward ? s->edge_b : s->edge_a;
      line.points.push_back(to_world(g, s->ci, s->cj, forward ? s->b : s->a));
      const auto& slot = ends[next_key];
      const int next = slot[0] == cur ? slot[1] : slot[0];
      key = next_key;
      cur = next;
      if (key == from_key) {
        line.closed = true;
        break;
      }
    }
    lines.push_back(std::move(line));
  };

  // Open chains first (they end on the axis), then loops.
  for (std::size_t s = 0; s < segs.size(); ++s) {
    if (used[s]) continue;
    for (std::int64_t key : {segs[s]->edge_a, segs[s]->edge_b}) {
      const auto& slot = ends[key];
      if (slot[1] < 0 && !used[s]) walk(static_cast<int>(s), key);
    }
  }
  for (std::size_t s = 0; s < segs.size(); ++s) {
    if (!used[s]) walk(static_cast<int>(s), segs[s]->edge_a);
  }
  return lines;
}

}  // namespace

ComponentSet extract_components(const AxiGrid& grid) {
  ComponentSet out;
  const std::size_t n = grid.size();
  out.labels.assign(n, ComponentSet::kOutside);
  const auto& v = grid.values();
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (!(v[start] < 0.0) || out.labels[start] != ComponentSet::kOutside) continue;
    ComponentSet::Component comp;
    comp.label = static_cast<int>(out.components.size());
    comp.first_node = start;
    out.labels[start] = comp.label;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t idx = stack.back();
      stack.pop_back();
      comp.nodes.push_back(idx);
      const int i = grid.col(idx), j = grid.row(idx);
      const std::array<std::array<int, 2>, 4> nb = {
          {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}}};
      for (const auto& [ni, nj] : nb) {
        if (ni < 0 || nj < 0 || ni >= grid.n_rho() || nj >= grid.n_z()) continue;
        const std::size_t k = grid.index(ni, nj);
        if (v[k] < 0.0 && out.labels[k] == ComponentSet::kOutside) {
          out.labels[k] = comp.label;
          stack.push_back(k);
        }
      }
    }
    std::sort(comp.nodes.begin(), comp.nodes.end());
    out.components.push_back(std::move(comp));
  }
  return out;
}

std::size_t count_components(const AxiGrid& grid) { return extract_components(grid).size(); }

std::vector<Segment> contour_segments(const AxiGrid& grid, const ComponentSet& components) {
  std::vector<Segment> out;
  const CellWalker walk(grid, components.labels);
  for (int j = 0; j + 1 < grid.n_z(); ++j) {
    for (int i = 0; i + 1 < grid.n_rho(); ++i) {
      const CellGeometry cell = walk(i, j);
      for (int s = 0; s < cell.n_segments; ++s) out.push_back(cell.segments[static_cast<std::size_t>(s)]);
    }
  }
  return out;
}

Point segment_world(const AxiGrid& grid, const Segment& s, bool first) {
  return to_world(grid, s.ci, s.cj, first ? s.a : s.b);
}

std::vector<Polyline> interface_contour(const AxiGrid& grid, const ComponentSet& components,
                                        int label) {
  const std::vector<Segment> all = contour_segments(grid, components);
  std::vector<const Segment*> mine;
  for (const auto& s : all)
    if (s.label == label) mine.push_back(&s);
  return chain(grid, mine);
}

double g_perimeter(const AmbientMetric& metric, const Polyline& polyline) {
  double sum = 0.0;
  const auto& p = polyline.points;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    const Point m = mid(p[k], p[k + 1]);
    if (metric.mass() > 0.0 && !metric.on_manifold(radius_of(m))) continue;
    const double len = std::hypot(p[k + 1].rho - p[k].rho, p[k + 1].z - p[k].z);
    sum += kTwoPi * m.rho * len * area_density(metric, m);
  }
  return sum;
}

double g_perimeter(const AmbientMetric& metric, const AxiGrid& grid,
                   const std::vector<Segment>& segments, int label) {
  double sum = 0.0;
  for (const auto& s : segments)
    if (s.label == label) sum += segment_perimeter(metric, grid, s);
  return sum;
}

double g_volume(const AmbientMetric& metric, const AxiGrid& grid, const ComponentSet& components,
                int label) {
  double sum = 0.0;
  const CellWalker walk(grid, components.labels);
  for (int j = 0; j + 1 < grid.n_z(); ++j) {
    for (int i = 0; i + 1 < grid.n_rho(); ++i) {
      if (components.labels[grid.index(i, j)] < 0 && components.labels[grid.index(i + 1, j)] < 0 &&
          components.labels[grid.index(i, j + 1)] < 0 &&
          components.labels[grid.index(i + 1, j + 1)] < 0 && grid.at(i, j) > 0.0 &&
          grid.at(i + 1, j) > 0.0 && grid.at(i, j + 1) > 0.0 && grid.at(i + 1, j + 1) > 0.0) {
        continue;
      }
      const CellGeometry cell = walk(i, j);
      for (int p = 0; p < cell.n_polygons; ++p) {
        const auto& poly = cell.polygons[static_cast<std::size_t>(p)];
        if (poly.label == label) sum += polygon_volume(metric, grid, i, j, poly);
      }
    }
  }
  return sum;
}

double g_mean_curvature_at(const AmbientMetric& metric, const AxiGrid& grid, Point p) {
  const double fx = p.rho / grid.h();
  const double fz = (p.z - grid.z_min()) / grid.h();
  const int i = std::clamp(static_cast<int>(std::floor(fx)), 0, grid.n_rho() - 2);
  const int j = std::clamp(static_cast<int>(std::floor(fz)), 0, grid.n_z() - 2);
  return curvature_in_cell(metric, grid, i, j, Point{fx - i, fz - j}, p);
}

double interface_h_sq(const AmbientMetric& metric, const AxiGrid& grid, const Polyline& polyline) {
  double sum = 0.0;
  const auto& p = polyline.points;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) sum += segment_h_sq(metric, grid, p[k], p[k + 1]);
  return sum;
}

std::vector<ComponentMeasure> measure_components(const AmbientMetric& metric, const AxiGrid& grid,
                                                 const ComponentSet& components,
                                                 const MeasureOptions& options) {
  std::vector<ComponentMeasure> out(components.size());
  for (std::size_t c = 0; c < components.size(); ++c) {
    out[c].label = components.components[c].label;
    out[c].first_node = components.components[c].first_node;
    out[c].cells = components.components[c].nodes;
  }
  if (components.empty()) return out;

  std::vector<std::vector<const Segment*>> per_label(components.size());
  std::vector<Segment> segments;
  const CellWalker walk(grid, components.labels);
  for (int j = 0; j + 1 < grid.n_z(); ++j) {
    for (int i = 0; i + 1 < grid.n_rho(); ++i) {
      if (components.labels[grid.index(i, j)] < 0 && components.labels[grid.index(i + 1, j)] < 0 &&
          components.labels[grid.index(i, j + 1)] < 0 &&
          components.labels[grid.index(i + 1, j + 1)] < 0 && grid.at(i, j) > 0.0 &&
          grid.at(i + 1, j) > 0.0 && grid.at(i, j + 1) > 0.0 && grid.at(i + 1, j + 1) > 0.0) {
        continue;
      }
      const CellGeometry cell = walk(i, j);
      for (int p = 0; options.with_volume && p < cell.n_polygons; ++p) {
        const auto& poly = cell.polygons[static_cast<std::size_t>(p)];
        if (poly.label >= 0)
          out[static_cast<std::size_t>(poly.label)].volume += polygon_volume(metric, grid, i, j, poly);
      }
      for (int s = 0; s < cell.n_segments; ++s) segments.push_back(cell.segments[static_cast<std::size_t>(s)]);
    }
  }
  for (const auto& s : segments) {
    if (s.label < 0) continue;
    auto& m = out[static_cast<std::size_t>(s.label)];
    m.perimeter += segment_perimeter(metric, grid, s);
    m.flat_length += grid.h() * std::hypot(s.a.rho - s.b.rho, s.a.z - s.b.z);
    if (options.with_h_sq) {
      m.h_sq_integral += segment_h_sq(metric, grid, s);
    }
    if (options.with_curves) per_label[static_cast<std::size_t>(s.label)].push_back(&s);
  }
  if (options.with_curves) {
    for (std::size_t c = 0; c < out.size(); ++c) out[c].curve_count = chain(grid, per_label[c]).size();
  }
  return out;
}

}  // namespace isoflow
