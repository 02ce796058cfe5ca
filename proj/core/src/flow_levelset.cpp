#include "isoflow/flow_levelset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "isoflow/errors.hpp"
#include "isoflow/mass.hpp"
#include "isoflow/profile.hpp"

namespace isoflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Ring of the 8 neighbours in circular order; even entries are 4-neighbours.
constexpr std::array<std::array<int, 2>, 8> kRing = {
    {{0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}}};

// Number of circular runs of inside ring nodes that touch a 4-neighbour.
int attached_runs(const AxiGrid& g, int i, int j) {
  std::array<bool, 8> in{};
  for (std::size_t k = 0; k < 8; ++k) {
    const int ni = i + kRing[k][0], nj = j + kRing[k][1];
    in[k] = ni >= 0 && nj >= 0 && ni < g.n_rho() && nj < g.n_z() && g.at(ni, nj) < 0.0;
  }
  std::size_t start = 8;
  for (std::size_t k = 0; k < 8; ++k) {
    if (!in[k]) {
      start = k;
      break;
    }
  }
  if (start == 8) return 1;
  int runs = 0;
  bool in_run = false, touches = false;
  for (std::size_t step = 1; step <= 8; ++step) {
    const std::size_t k = (start + step) % 8;
    if (in[k]) {
      in_run = true;
      touches = touches || (k % 2 == 0);
    } else if (in_run) {
      runs += touches ? 1 : 0;
      in_run = touches = false;
    }
  }
  return runs;
}

double point_segment_distance(Point p, Point a, Point b) {
  const double dx = b.rho - a.rho, dz = b.z - a.z;
  const double len2 = dx * dx + dz * dz;
  double t = len2 > 0.0 ? ((p.rho - a.rho) * dx + (p.z - a.z) * dz) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double er = p.rho - (a.rho + t * dx), ez = p.z - (a.z + t * dz);
  return std::sqrt(er * er + ez * ez);
}

std::vector<int> match_ids(LevelSetState& st, const ComponentSet& cs) {
  struct Claim {
    int id;
    std::size_t overlap;
    std::size_t first_node;
    std::size_t comp;
  };
  std::vector<Claim> claims;
  std::vector<int> ids(cs.size(), -1);
  for (std::size_t c = 0; c < cs.size(); ++c) {
    std::map<int, std::size_t> overlap;
    for (std::size_t node : cs.components[c].nodes) {
      const int id = st.node_id.empty() ? -1 : st.node_id[node];
      if (id >= 0) ++overlap[id];
    }
    int best = -1;
    std::size_t best_count = 0;
    for (const auto& [id, count] : overlap) {
      const bool better =
          count > best_count ||
          (count == best_count && best >= 0 && st.first_node_of[id] < st.first_node_of[best]);
      if (better) {
        best = id;
        best_count = count;
      }
    }
    if (best >= 0) claims.push_back({best, best_count, cs.components[c].first_node, c});
  }
  std::sort(claims.begin(), claims.end(), [](const Claim& a, const Claim& b) {
    return std::tie(a.id, b.overlap, a.first_node) < std::tie(b.id, a.overlap, b.first_node);
  });
  int last = -1;
  for (const auto& claim : claims) {
    if (claim.id != last) ids[claim.comp] = claim.id;
    last = claim.id;
  }
  for (std::size_t c = 0; c < cs.size(); ++c) {
    if (ids[c] < 0) ids[c] = st.next_id++;
  }
  return ids;
}

void freeze_component(LevelSetState& st, const ComponentSet::Component& comp) {
  auto& g = st.grid;
  for (std::size_t node : comp.nodes) {
    st.frozen[node] = 1;
    const int i = g.col(node), j = g.row(node);
    for (const auto& [di, dj] : kRing) {
      const int ni = i + di, nj = j + dj;
      if (ni < 0 || nj < 0 || ni >= g.n_rho() || nj >= g.n_z()) continue;
      const std::size_t k = g.index(ni, nj);
      if (!(g.values()[k] < 0.0)) st.frozen[k] = 1;
    }
  }
}

}  // namespace

double LevelSetState::freeze_area() const { return convexity_threshold(threshold_mass); }

std::size_t LevelSetState::frozen_node_count() const {
  return static_cast<std::size_t>(std::count(frozen.begin(), frozen.end(), std::uint8_t{1}));
}

LevelSetState make_state(const AmbientMetric& metric, AxiGrid grid, double threshold_mass) {
  if (!(threshold_mass >= 0.0)) throw DomainError("level-set flow: threshold mass must be >= 0");
  LevelSetState st;
  st.threshold_mass = threshold_mass;
  const std::size_t n = grid.size();
  st.frozen.assign(n, 0);
  st.arrival.assign(n, kInf);
  st.node_id.assign(n, -1);
  auto& c = st.coeff;
  c.inv_w4.assign(n, 1.0);
  c.adv_r.assign(n, 0.0);
  c.adv_z.assign(n, 0.0);
  c.active.assign(n, 0);
  c.min_w4 = kInf;
  for (int j = 0; j < grid.n_z(); ++j) {
    for (int i = 0; i < grid.n_rho(); ++i) {
      const std::size_t idx = grid.index(i, j);
      if (grid.is_border(i, j)) continue;
      const double rho = grid.rho(i), z = grid.z(j);
      const double r = std::hypot(rho, z);
      if (metric.mass() > 0.0) {
        if (!(r > 0.0) || !metric.on_manifold(r)) continue;
        const double w = metric.conformal_factor(r);
        const double w4 = (w * w) * (w * w);
        const double dlnw = metric.log_factor_derivative(r);
        c.inv_w4[idx] = 1.0 / w4;
        c.adv_r[idx] = 4.0 / w4 * dlnw * rho / r;
        c.adv_z[idx] = 4.0 / w4 * dlnw * z / r;
        c.min_w4 = std::min(c.min_w4, w4);
      } else {
        c.min_w4 = 1.0;
      }
      c.active[idx] = 1;
    }
  }
  if (!std::isfinite(c.min_w4)) c.min_w4 = 1.0;
  st.grid = std::move(grid);
  st.scratch.resize(n);
  return st;
}

double cfl_limit(const LevelSetState& st) {
  return 0.2 * st.grid.h() * st.grid.h() * st.coeff.min_w4;
}

StepReport evolve_step(LevelSetState& st, const AmbientMetric& metric, double dt) {
  (void)metric;  // coefficients are cached in the state
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    std::ostringstream os;
    os << "evolve_step: dt = " << dt << " must be positive and finite";
    throw DomainError(os.str());
  }
  AxiGrid& g = st.grid;
  const auto& v = g.values();
  auto& next = st.scratch;
  std::copy(v.begin(), v.end(), next.begin());
  const int nr = g.n_rho();
  const double h = g.h();
  const double inv_h = 1.0 / h;
  const auto& c = st.coeff;
  bool finite = true;

  for (int j = 1; j + 1 < g.n_z(); ++j) {
    for (int i = 0; i + 1 < nr; ++i) {
      const std::size_t idx = g.index(i, j);
      if (!c.active[idx] || st.frozen[idx]) continue;
      const double u = v[idx];
      const double e = v[idx + 1];
      const double w = i > 0 ? v[idx - 1] : e;
      const double n = v[idx + nr];
      const double s = v[idx - nr];
      const double ne = v[idx + nr + 1];
      const double se = v[idx - nr + 1];
      const double nw = i > 0 ? v[idx + nr - 1] : ne;
      const double sw = i > 0 ? v[idx - nr - 1] : se;
      NodeDerivatives d;
      d.u_r = 0.5 * (e - w) * inv_h;
      d.u_z = 0.5 * (n - s) * inv_h;
      d.u_rr = (e - 2.0 * u + w) * inv_h * inv_h;
      d.u_zz = (n - 2.0 * u + s) * inv_h * inv_h;
      d.u_rz = 0.25 * (ne - nw - se + sw) * inv_h * inv_h;
      double rate = c.inv_w4[idx] * curvature_times_gradient(d, g.rho(i));
      const double br = c.adv_r[idx], bz = c.adv_z[idx];
      if (br != 0.0) rate += br * (br > 0.0 ? (e - u) : (u - w)) * inv_h;
      if (bz != 0.0) rate += bz * (bz > 0.0 ? (n - u) : (u - s)) * inv_h;
      const double updated = u + dt * rate;
      finite = finite && std::isfinite(updated);
      next[idx] = updated;
    }
  }
  if (!finite) {
    throw NumericalBlowup("level-set field became non-finite", st.t);
  }

  StepReport report;
  const double t_new = st.t + dt;
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    const bool was_in = v[idx] < 0.0;
    const bool now_in = next[idx] < 0.0;
    if (was_in == now_in) continue;
    ++report.flipped;
    if (was_in && !std::isfinite(st.arrival[idx])) st.arrival[idx] = t_new;
  }
  g.values().swap(next);
  st.t = t_new;
  if (report.flipped > 0) {
    const auto& nv = g.values();
    for (std::size_t idx = 0; idx < nv.size() && !report.topology_suspect; ++idx) {
      if ((st.scratch[idx] < 0.0) == (nv[idx] < 0.0)) continue;
      const int runs = attached_runs(g, g.col(idx), g.row(idx));
      report.topology_suspect = runs != 1;
    }
  }
  return report;
}

void freeze_sweep(LevelSetState& st, const AmbientMetric& metric, const SweepOptions& options) {
  const ComponentSet cs = extract_components(st.grid);
  MeasureOptions mo;
  mo.with_h_sq = options.full_measure;
  mo.with_curves = options.full_measure;
  mo.with_volume = options.full_measure;
  std::vector<ComponentMeasure> measures = measure_components(metric, st.grid, cs, mo);
  const std::vector<int> ids = match_ids(st, cs);

  const double threshold = st.freeze_area();
  const double speck_area = 16.0 * kFourPi * st.grid.h() * st.grid.h();
  std::vector<ComponentRecord> records;
  records.reserve(cs.size());
  bool remeasured = options.full_measure;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const auto& comp = cs.components[k];
    const int id = ids[k];
    const bool all_frozen = std::all_of(comp.nodes.begin(), comp.nodes.end(),
                                        [&](std::size_t n) { return st.frozen[n] != 0; });
    auto stored = st.frozen_records.find(id);
    if (all_frozen && stored != st.frozen_records.end()) {
      ComponentRecord rec = stored->second;
      rec.curve_count = measures[k].curve_count;
      records.push_back(rec);
      continue;
    }
    // Sub-cell specks left behind by a pinch keep flowing and vanish.
    const bool speck = measures[k].perimeter < speck_area;
    const bool freeze_now = threshold > 0.0 && measures[k].perimeter < threshold && !speck;
    if (freeze_now && !remeasured) {
      measures = measure_components(metric, st.grid, cs, MeasureOptions{true, true, true});
      remeasured = true;
    }
    const auto& m = measures[k];
    ComponentRecord rec;
    rec.id = id;
    rec.perimeter = m.perimeter;
    rec.volume = m.volume;
    rec.flat_length = m.flat_length;
    rec.node_count = comp.nodes.size();
    if (mo.with_h_sq || remeasured) {
      rec.h_sq_integral = m.h_sq_integral;
      rec.curve_count = m.curve_count;
      rec.hawking = m.perimeter > 0.0 ? hawking_mass(m.perimeter, m.h_sq_integral) : 0.0;
    }
    if (freeze_now) {
      rec.frozen = true;
      rec.freeze_time = st.t;
      freeze_component(st, comp);
      st.frozen_records[id] = rec;
    }
    records.push_back(rec);
  }

  std::fill(st.node_id.begin(), st.node_id.end(), -1);
  for (std::size_t k = 0; k < cs.size(); ++k) {
    for (std::size_t node : cs.components[k].nodes) st.node_id[node] = ids[k];
    st.first_node_of.try_emplace(ids[k], cs.components[k].first_node);
  }
  st.components = std::move(records);
  st.component_count = cs.size();
}

void reinitialize(LevelSetState& st) {
  AxiGrid& g = st.grid;
  const int nr = g.n_rho(), nz = g.n_z();
  const double h = g.h();
  const ComponentSet cs = extract_components(g);
  const std::vector<Segment> segs = contour_segments(g, cs);
  if (segs.empty()) return;

  // Segments bucketed by cell (CSR layout).
  const std::size_t n_cells = static_cast<std::size_t>(nr - 1) * static_cast<std::size_t>(nz - 1);
  std::vector<std::size_t> offset(n_cells + 1, 0);
  auto cell_of = [&](const Segment& s) {
    return static_cast<std::size_t>(s.cj) * static_cast<std::size_t>(nr - 1) +
           static_cast<std::size_t>(s.ci);
  };
  for (const auto& s : segs) ++offset[cell_of(s) + 1];
  for (std::size_t k = 0; k < n_cells; ++k) offset[k + 1] += offset[k];
  std::vector<std::size_t> bucket(segs.size());
  {
    std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
    for (std::size_t s = 0; s < segs.size(); ++s) bucket[fill[cell_of(segs[s])]++] = s;
  }

  // Exact distance to the piecewise-linear interface in a band of kBand cells.
  constexpr int kBand = 3;
  std::vector<double> dist(g.size(), kInf);
  std::vector<std::uint8_t> fixed(g.size(), 0);
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> nearest(g.size(), kNone);
  for (const auto& s : segs) {
    for (int dj = -kBand; dj <= kBand + 1; ++dj) {
      for (int di = -kBand; di <= kBand + 1; ++di) {
        const int i = s.ci + di, j = s.cj + dj;
        if (i < 0 || j < 0 || i >= nr || j >= nz) continue;
        const std::size_t idx = g.index(i, j);
        const Point p{g.rho(i), g.z(j)};
        const double d =
            point_segment_distance(p, segment_world(g, s, true), segment_world(g, s, false));
        if (d < dist[idx]) {
          dist[idx] = d;
          nearest[idx] = &s - segs.data();
        }
        fixed[idx] = 1;
      }
    }
  }
  for (std::size_t idx = 0; idx < dist.size(); ++idx) {
    if (fixed[idx] && dist[idx] > kBand * h) fixed[idx] = 0;
    if (!fixed[idx]) {
      dist[idx] = kInf;
      nearest[idx] = kNone;
    }
  }

  // The chord polyline sits O(h^2 kappa) inside a convex interface. Each
  // segment gets the mean offset between the chord distance and u / |grad u|
  // at the endpoints of its crossed edges, and band nodes are shifted by the
  // offset of their nearest segment.
  const auto& u = g.values();
  auto rescaled = [&](std::size_t idx) {
    const NodeDerivatives d = node_derivatives(g, g.col(idx), g.row(idx));
    const double grad = std::hypot(d.u_r, d.u_z);
    return grad > 0.0 ? u[idx] / grad : 0.0;
  };
  auto edge_nodes = [&](std::int64_t key, std::array<std::size_t, 2>& out) -> int {
    if (key < 0) {
      out[0] = static_cast<std::size_t>(-1 - key);
      return 1;
    }
    const auto node = static_cast<std::size_t>(key / 2);
    out[0] = node;
    out[1] = (key % 2 == 0) ? node + 1 : node + static_cast<std::size_t>(nr);
    return 2;
  };
  std::vector<double> offset_of(segs.size(), 0.0);
  for (std::size_t k = 0; k < segs.size(); ++k) {
    double sum = 0.0;
    int count = 0;
    for (std::int64_t key : {segs[k].edge_a, segs[k].edge_b}) {
      std::array<std::size_t, 2> nodes{};
      const int n = edge_nodes(key, nodes);
      for (int q = 0; q < n; ++q) {
        const std::size_t idx = nodes[static_cast<std::size_t>(q)];
        if (!std::isfinite(dist[idx])) continue;
        const double signed_chord = u[idx] < 0.0 ? -dist[idx] : dist[idx];
        const double gap = signed_chord - rescaled(idx);
        // Near pinches |grad u| degenerates and u / |grad u| is meaningless.
        if (!(std::abs(gap) <= 0.25 * h)) continue;
        sum += gap;
        ++count;
      }
    }
    offset_of[k] = count > 0 ? sum / count : 0.0;
  }
  for (std::size_t idx = 0; idx < dist.size(); ++idx) {
    if (!fixed[idx]) continue;
    const double sd = (u[idx] < 0.0 ? -dist[idx] : dist[idx]) - offset_of[nearest[idx]];
    dist[idx] = std::abs(sd);
  }

  // Fast sweeping for the Eikonal equation |grad d| = 1 away from the band.
  auto relax = [&](int i, int j) {
    const std::size_t idx = g.index(i, j);
    if (fixed[idx]) return;
    const double left = i > 0 ? dist[idx - 1] : (nr > 1 ? dist[idx + 1] : kInf);
    const double right = i + 1 < nr ? dist[idx + 1] : kInf;
    const double down = j > 0 ? dist[idx - static_cast<std::size_t>(nr)] : kInf;
    const double up = j + 1 < nz ? dist[idx + static_cast<std::size_t>(nr)] : kInf;
    const double a = std::min(left, right);
    const double b = std::min(down, up);
    if (!std::isfinite(a) && !std::isfinite(b)) return;
    double cand;
    if (std::abs(a - b) >= h) {
      cand = std::min(a, b) + h;
    } else {
      cand = 0.5 * (a + b + std::sqrt(2.0 * h * h - (a - b) * (a - b)));
    }
    if (cand < dist[idx]) dist[idx] = cand;
  };
  for (int round = 0; round < 2; ++round) {
    for (int j = 0; j < nz; ++j)
      for (int i = 0; i < nr; ++i) relax(i, j);
    for (int j = 0; j < nz; ++j)
      for (int i = nr - 1; i >= 0; --i) relax(i, j);
    for (int j = nz - 1; j >= 0; --j)
      for (int i = nr - 1; i >= 0; --i) relax(i, j);
    for (int j = nz - 1; j >= 0; --j)
      for (int i = 0; i < nr; ++i) relax(i, j);
  }

  auto& v = g.values();
  const double tiny = 1e-12 * h;
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    if (st.frozen[idx] || !std::isfinite(dist[idx])) continue;
    v[idx] = v[idx] < 0.0 ? -std::max(dist[idx], tiny) : dist[idx];
  }
}

TraceSample sample(LevelSetState& st, const AmbientMetric& metric, bool with_mask) {
  freeze_sweep(st, metric, SweepOptions{true});
  TraceSample s;
  s.t = st.t;
  s.components = st.components;
  s.n_components = st.components.size();
  for (const auto& rec : st.components) {
    s.area += rec.perimeter;
    s.volume += rec.volume;
    s.flat_length += rec.flat_length;
    if (rec.frozen) {
      ++s.n_frozen;
    } else if (rec.curve_count > 1) {
      std::ostringstream os;
      os.precision(17);
      os << "t=" << st.t << ": live component " << rec.id << " has " << rec.curve_count
         << " boundary curves";
      st.warnings.push_back(os.str());
    }
  }
  const double m = st.threshold_mass;
  const double prof = s.area >= horizon_area(m) && s.area > 0.0 ? phi(m, s.area) : 0.0;
  s.monotone_q = prof - s.volume;
  s.ratio = s.volume > 0.0 ? std::pow(s.area, 1.5) / s.volume : 0.0;
  if (with_mask) {
    s.inside.resize(st.grid.size());
    const auto& v = st.grid.values();
    for (std::size_t k = 0; k < v.size(); ++k) s.inside[k] = v[k] < 0.0 ? 1 : 0;
  }
  return s;
}

double select_dt(const LevelSetState& st, const FlowSettings& settings) {
  const double limit = cfl_limit(st);
  double dt = settings.dt > 0.0 ? settings.dt : limit;
  if (settings.sample_interval > 0.0) {
    const double steps = std::ceil(settings.sample_interval / dt - 1e-9);
    dt = settings.sample_interval / std::max(1.0, steps);
  }
  return dt;
}

FlowRun run_modified_flow(const AmbientMetric& metric, AxiGrid initial,
                          const FlowSettings& settings) {
  if (!(settings.t_max > 0.0) || settings.sweep_every < 1 || settings.reinit_every < 1) {
    throw DomainError("run_modified_flow: need t_max > 0 and positive sweep/reinit cadences");
  }
  FlowRun run;
  LevelSetState& st = run.final_state;
  st = make_state(metric, std::move(initial), settings.threshold_mass);
  reinitialize(st);

  FlowTrace& trace = run.trace;
  const double dt = select_dt(st, settings);
  if (dt > cfl_limit(st) * (1.0 + 1e-9)) {
    // An explicit step above the limit is honoured; the scheme is then unstable
    // and typically ends in NumericalBlowup.
    std::ostringstream os;
    os << "dt = " << dt << " exceeds the CFL limit " << cfl_limit(st);
    st.warnings.push_back(os.str());
  }
  trace.dt = dt;
  trace.h = st.grid.h();
  const auto steps_per_sample = static_cast<std::size_t>(
      std::max(1.0, std::round(settings.sample_interval / dt)));

  trace.samples.push_back(sample(st, metric, settings.record_masks));
  auto finished = [&] {
    return std::all_of(st.components.begin(), st.components.end(),
                       [](const ComponentRecord& r) { return r.frozen; });
  };

  std::size_t step_count = 0;
  try {
    while (!finished() && st.t < settings.t_max - 0.5 * dt) {
      const StepReport report = evolve_step(st, metric, dt);
      ++step_count;
      st.t = static_cast<double>(step_count) * dt;  // no accumulated roundoff
      bool swept = false;
      if (report.topology_suspect && count_components(st.grid) != st.component_count) {
        freeze_sweep(st, metric);
        swept = true;
      }
      if (!swept && step_count % static_cast<std::size_t>(settings.sweep_every) == 0) {
        freeze_sweep(st, metric);
      }
      if (step_count % static_cast<std::size_t>(settings.reinit_every) == 0) reinitialize(st);
      if (step_count % steps_per_sample == 0) {
        trace.samples.push_back(sample(st, metric, settings.record_masks));
      }
    }
  } catch (const NumericalBlowup& e) {
    const double last = trace.samples.empty() ? 0.0 : trace.samples.back().t;
    throw NumericalBlowup(e.what(), last);
  }

  trace.steps = step_count;
  if (trace.samples.back().t != st.t) {
    trace.samples.push_back(sample(st, metric, settings.record_masks));
  }
  trace.complete = finished();
  if (trace.complete) trace.terminal_time = st.t;
  trace.warnings = st.warnings;
  return run;
}

}  // namespace isoflow
