#include "isoflow/cli/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "isoflow/errors.hpp"
#include "isoflow/flow_levelset.hpp"
#include "isoflow/flow_ode.hpp"
#include "isoflow/mass.hpp"
#include "isoflow/metric.hpp"
#include "isoflow/profile.hpp"

namespace isoflow::cli {

namespace fs = std::filesystem;

namespace {

Verdict upper_bound(const std::string& anchor, double value, double limit) {
  return Verdict{value <= limit, anchor, limit - value};
}

Verdict lower_bound(const std::string& anchor, double value, double limit) {
  return Verdict{value >= limit, anchor, value - limit};
}

std::string note(const std::string& what, double value) {
  return what + " = " + format_double(value);
}

class Csv {
 public:
  Csv(const fs::path& path, const std::string& header) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << header << '\n';
  }
  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double x) { return format_double(x); }
  static std::string cell(std::size_t x) { return std::to_string(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(const std::string& s) { return s; }

  std::ofstream out_;
};

// max / min of the values; infinity when one vanishes.
double variation(const std::vector<double>& xs) {
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
}

void write_verdicts(const fs::path& dir, const ScenarioReport& report) {
  std::ofstream out(dir / "verdicts.txt", std::ios::binary);
  for (const auto& v : report.verdicts) {
    out << (v.pass ? "PASS " : "FAIL ") << v.anchor << " slack=" << format_double(v.slack) << '\n';
  }
}

// ---------------------------------------------------------------- lemma suite

void lemma_suite(const Scenario& sc, ScenarioReport& rep) {
  const double m = sc.metric.m;
  const AmbientMetric metric = sc.metric.build();
  const double threshold = convexity_threshold(m);

  const double slope = ratio_slope_term(m, threshold) / (m * m * m);
  rep.notes.push_back(note("ratio slope term at 36 pi m^2 / m^3", slope));
  rep.verdicts.push_back(upper_bound("ratio-slope@36pi", std::abs(slope - 19.6), 0.05));

  const double located = locate_convexity_threshold(m);
  rep.verdicts.push_back(
      upper_bound("convexity-threshold@36pi", std::abs(located / threshold - 1.0), 1e-6));
  const double root = radius_from_area(m, located);
  rep.verdicts.push_back(
      upper_bound("convexity-radius", std::abs(root / convexity_radius(m) - 1.0), 1e-9));

  rep.verdicts.push_back(upper_bound(
      "horizon-area",
      std::abs(sphere_area(metric, metric.horizon_radius()) / horizon_area(m) - 1.0), 1e-12));

  double worst = 0.0;
  for (double f : {0.6, 1.0, 2.0, 10.0, 100.0}) {
    worst = std::max(worst, std::abs(sphere_hawking_mass(metric, f * m) / m - 1.0));
  }
  rep.verdicts.push_back(upper_bound("sphere-hawking-identity", worst, 1e-10));

  std::vector<double> rescaled;
  for (double a : {1e3, 1e5, 1e7}) {
    const double area = a * m * m;
    const double est = mass_from_region(area, phi(m, area));
    rescaled.push_back(std::abs(est / m - 1.0) * std::sqrt(a));
    rep.notes.push_back(note("mass estimate / m at A = " + format_double(a) + " m^2", est / m));
  }
  rep.verdicts.push_back(upper_bound("mass-estimate-decay", variation(rescaled), 2.0));

  const double u = kFourPi / 4.0 * m * m;  // pi m^2
  const std::vector<double> b = {36 * u, 40 * u, 60 * u};
  const std::vector<double> a = {40 * u, 50 * u, 90 * u};
  double gap = std::numeric_limits<double>::infinity();
  for (double gamma : {0.0, 10 * u, 200 * u}) {
    gap = std::min(gap, superadditivity_gap(m, gamma, a, b));
  }
  rep.verdicts.push_back(lower_bound("profile-superadditivity", gap / (m * m * m), 0.0));

  double euclid = 0.0;
  for (double area : {1.0, 100.0, 1e4}) {
    euclid = std::max(euclid, std::abs(ratio_slope_term(0.0, area)) / phi(0.0, area));
  }
  rep.verdicts.push_back(upper_bound("euclidean-ratio-identity", euclid, 1e-12));
}

// ------------------------------------------------------------------- ODE flow

void ode_flow(const Scenario& sc, const fs::path& dir, ScenarioReport& rep) {
  const AmbientMetric metric = sc.metric.build();
  const double r0 = sc.shape->r0;
  const Tolerances& tol = sc.tolerances;
  StepSizeChoice choice;
  if (sc.time.dt) {
    choice.dt = *sc.time.dt;
    choice.drift = run_symmetric_flow(metric, r0, choice.dt, sc.time.t_max).relative_q_drift();
    choice.drift_half =
        run_symmetric_flow(metric, r0, 0.5 * choice.dt, sc.time.t_max).relative_q_drift();
    choice.reduction = choice.drift_half > 0.0 ? choice.drift / choice.drift_half
                                               : std::numeric_limits<double>::infinity();
  } else {
    choice = select_ode_step(metric, r0, sc.time.t_max, tol.q_drift, tol.drift_reduction);
  }
  rep.notes.push_back(note("dt", choice.dt));
  rep.notes.push_back(note("relative Q drift", choice.drift));
  rep.notes.push_back(note("relative Q drift at dt/2", choice.drift_half));
  rep.verdicts.push_back(upper_bound("flow-ode-q-drift", choice.drift, tol.q_drift));
  rep.verdicts.push_back(lower_bound("flow-ode-convergence", choice.reduction, tol.drift_reduction));

  // Differencing error scales as dt^4; a quarter step keeps it below the flow's own error.
  const double fd_dt = 0.25 * choice.dt;
  const SymmetricFlowTrace fine = run_symmetric_flow(metric, r0, fd_dt, sc.time.t_max);
  const auto& st = fine.states;
  double worst = 0.0;
  for (std::size_t k = 2; k + 2 < st.size(); ++k) {
    if (fine.reached_horizon && k + 3 >= st.size()) break;
    const double rate =
        (-st[k + 2].area + 8.0 * st[k + 1].area - 8.0 * st[k - 1].area + st[k - 2].area) /
        (12.0 * fd_dt);
    const double h = sphere_mean_curvature(metric, st[k].r);
    const double expected = -h * h * st[k].area;
    if (expected != 0.0) worst = std::max(worst, std::abs(rate / expected - 1.0));
  }
  rep.verdicts.push_back(upper_bound("flow-ode-area-rate", worst, tol.area_rate));

  const SymmetricFlowTrace trace = run_symmetric_flow(metric, r0, choice.dt, sc.time.t_max);
  Csv csv(dir / "trace.csv", "t,A_total,V_total,Q,ratio,n_components,n_frozen");
  const auto every = static_cast<std::size_t>(
      std::max(1.0, std::round(sc.time.sample_interval / choice.dt)));
  for (std::size_t k = 0; k < trace.states.size(); ++k) {
    if (k % every != 0 && k + 1 != trace.states.size()) continue;
    const auto& s = trace.states[k];
    const double ratio = s.volume > 0.0 ? std::pow(s.area, 1.5) / s.volume : 0.0;
    csv.row(s.t, s.area, s.volume, s.monotone_q, ratio, std::size_t{s.r > 0.0 ? 1u : 0u},
            std::size_t{0});
  }
}

// ----------------------------------------------------------------- mass table

void mass_table(const Scenario& sc, const fs::path& dir, ScenarioReport& rep) {
  const AmbientMetric metric = sc.metric.build();
  const double m = sc.metric.m;
  const Tolerances& tol = sc.tolerances;
  Csv csv(dir / "mass_table.csv", "r,perimeter,volume,qlm,ratio,rescaled_excess");
  const RegionSummary w = RegionSummary::coordinate_ball(metric, m > 0.0 ? 2.0 * m : 1.0);
  double bound_slack = std::numeric_limits<double>::infinity();
  std::vector<double> excess, deficit;
  for (double r : sc.radii) {
    const RegionSummary s = RegionSummary::coordinate_ball(metric, r);
    const double rescaled = (s.qlm - m) * std::sqrt(s.perimeter);
    csv.row(r, s.perimeter, s.volume, s.qlm, s.ratio, rescaled);
    if (s.perimeter >= convexity_threshold(m)) {
      bound_slack = std::min(bound_slack, check_iso_adm_bound(s, m, tol.iso_adm_constant));
    }
    if (m > 0.0 && s.perimeter >= 1e3 * m * m) {
      excess.push_back(std::abs(rescaled));
      const UnionGap g = union_gap(w, s);
      if (g.estimate_applies) deficit.push_back(std::abs(g.rescaled_deficit));
    }
  }
  if (std::isfinite(bound_slack)) {
    rep.verdicts.push_back(Verdict{bound_slack >= 0.0, "iso-adm-bound", bound_slack});
  }
  if (excess.size() >= 2) {
    rep.verdicts.push_back(upper_bound("exhaustion-mass-limit", variation(excess), 2.0));
  }
  if (deficit.size() >= 2) {
    rep.verdicts.push_back(upper_bound("union-gap-bounded", variation(deficit), 2.0));
  }
}

// ------------------------------------------------------------- level-set flow

AxiGrid initial_grid(const Scenario& sc, double h) {
  if (sc.grid.rho_max || sc.grid.z_min) {
    const ShapeSpec& shape = *sc.shape;
    const double pad = sc.grid.margin_cells * h;
    const double rho_max = sc.grid.rho_max.value_or(shape.extent_rho() + pad);
    const double zc = shape.kind == ShapeSpec::Kind::dumbbell ? 0.0 : shape.center_z;
    const double z_min = sc.grid.z_min.value_or(zc - shape.extent_z() - pad);
    const double z_max = sc.grid.z_max.value_or(zc + shape.extent_z() + pad);
    AxiGrid grid(rho_max, z_min, z_max, h);
    grid.fill([&](double rho, double z) { return shape.level_set(rho, z); });
    return grid;
  }
  return make_grid(*sc.shape, h, sc.grid.margin_cells);
}

// Inside nodes at `later` must be inside at `earlier` or within one cell of it.
std::size_t nesting_violations(const AxiGrid& g, const std::vector<std::uint8_t>& earlier,
                               const std::vector<std::uint8_t>& later) {
  std::size_t bad = 0;
  for (std::size_t idx = 0; idx < later.size(); ++idx) {
    if (!later[idx] || earlier[idx]) continue;
    const int i = g.col(idx), j = g.row(idx);
    bool near = false;
    for (int dj = -1; dj <= 1 && !near; ++dj) {
      for (int di = -1; di <= 1 && !near; ++di) {
        const int ni = i + di, nj = j + dj;
        if (ni < 0 || nj < 0 || ni >= g.n_rho() || nj >= g.n_z()) continue;
        near = earlier[g.index(ni, nj)] != 0;
      }
    }
    if (!near) ++bad;
  }
  return bad;
}

void levelset_flow(const Scenario& sc, const fs::path& dir, ScenarioReport& rep) {
  const AmbientMetric metric = sc.metric.build();
  const Tolerances& tol = sc.tolerances;
  const double m_thr = sc.threshold_mass.value_or(sc.metric.m);
  FlowSettings settings;
  settings.threshold_mass = m_thr;
  settings.dt = sc.time.dt.value_or(0.0);
  settings.t_max = sc.time.t_max;
  settings.sample_interval = sc.time.sample_interval;
  settings.sweep_every = sc.time.sweep_every;
  settings.reinit_every = sc.time.reinit_every;
  settings.record_masks = true;

  const FlowRun run = run_modified_flow(metric, initial_grid(sc, sc.grid.h), settings);
  const FlowTrace& trace = run.trace;
  const auto& samples = trace.samples;
  const double h = trace.h;
  rep.notes.push_back(note("dt", trace.dt));
  rep.notes.push_back(note("steps", static_cast<double>(trace.steps)));
  if (trace.terminal_time) rep.notes.push_back(note("terminal time", *trace.terminal_time));

  {
    Csv csv(dir / "trace.csv", "t,A_total,V_total,Q,ratio,n_components,n_frozen");
    for (const auto& s : samples) {
      csv.row(s.t, s.area, s.volume, s.monotone_q, s.ratio, s.n_components, s.n_frozen);
    }
  }
  {
    Csv csv(dir / "components.csv", "t,id,frozen,freeze_time,perimeter,volume,hawking");
    for (const auto& s : samples) {
      for (const auto& c : s.components) {
        csv.row(s.t, c.id, c.frozen ? 1 : 0,
                c.freeze_time ? format_double(*c.freeze_time) : std::string(), c.perimeter,
                c.volume, c.hawking);
      }
    }
  }
  if (sc.write_arrival) {
    Csv csv(dir / "arrival_time.csv", "rho,z,arrival");
    const auto& g = run.final_state.grid;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      csv.row(g.rho(g.col(idx)), g.z(g.row(idx)), run.final_state.arrival[idx]);
    }
  }
  if (!trace.warnings.empty()) {
    std::ofstream out(dir / "warnings.txt", std::ios::binary);
    for (const auto& w : trace.warnings) out << w << '\n';
  }

  const TraceSample& first = samples.front();
  double perimeter_slack = std::numeric_limits<double>::infinity();
  double q_rise = 0.0;
  std::size_t nesting = 0;
  for (std::size_t k = 1; k < samples.size(); ++k) {
    const double allowed = tol.perimeter_slack * h * samples[k - 1].flat_length;
    perimeter_slack =
        std::min(perimeter_slack, allowed - (samples[k].area - samples[k - 1].area));
    q_rise = std::max(q_rise, samples[k].monotone_q - samples[k - 1].monotone_q);
    nesting += nesting_violations(run.final_state.grid, samples[k - 1].inside, samples[k].inside);
  }
  if (samples.size() > 1) {
    rep.verdicts.push_back(
        Verdict{perimeter_slack >= 0.0, "perimeter-nonincreasing", perimeter_slack});
    const double q_slack =
        tol.q_slack.value_or(1e-3 * std::max(std::abs(first.monotone_q), first.volume));
    rep.notes.push_back(note("largest Q increase between samples", q_rise));
    rep.verdicts.push_back(upper_bound("monotone-q", q_rise, q_slack));
    rep.verdicts.push_back(
        upper_bound("nesting", static_cast<double>(nesting), 0.0));
  }

  // Ratio control applies to flows starting with Q <= 0 and only while the
  // region is resolved by the grid.
  if (first.volume > 0.0 && first.monotone_q <= tol.q_zero * first.volume) {
    double worst = 0.0;
    for (const auto& s : samples) {
      const bool live = s.n_frozen < s.n_components;
      const double radius = std::sqrt(s.area / kFourPi);
      if (live && radius >= tol.resolved_cells * h && s.volume > 0.0) {
        worst = std::max(worst, s.ratio / first.ratio - 1.0);
      }
    }
    rep.verdicts.push_back(upper_bound("ratio-control", worst, tol.ratio_growth));
  }

  if (m_thr > 0.0) {
    const double alpha = convexity_threshold(m_thr);
    rep.verdicts.push_back(Verdict{trace.complete, "flow-terminates",
                                   trace.complete ? sc.time.t_max - *trace.terminal_time : -1.0});
    double worst = 0.0, frozen_volume = 0.0;
    for (const auto& c : samples.back().components) {
      if (!c.frozen) continue;
      worst = std::max(worst, c.perimeter);
      frozen_volume += c.volume;
    }
    rep.verdicts.push_back(upper_bound("freeze-threshold", worst, alpha * (1.0 + tol.freeze_margin)));
    if (trace.complete) {
      // c0 is a fraction of the flat isoperimetric constant, a valid lower
      // bound only when the ambient metric is flat; otherwise just report.
      const double c0 = tol.volume_constant_factor * kSixSqrtPi;
      const double limit = small_component_volume_limit(c0, alpha, first.ratio);
      if (sc.metric.m == 0.0) {
        rep.verdicts.push_back(upper_bound("terminal-volume-bound", frozen_volume, limit));
      } else {
        rep.notes.push_back(note("frozen volume", frozen_volume));
        rep.notes.push_back(note("flat-comparison volume limit", limit));
      }
    }
  }

  if (sc.metric.m > 0.0) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
      for (const auto& c : s.components) {
        if (!c.frozen) worst = std::max(worst, c.hawking);
      }
    }
    if (std::isfinite(worst)) {
      rep.verdicts.push_back(
          upper_bound("hawking-bound", worst, sc.metric.m * (1.0 + tol.hawking_margin)));
    }
  }
}

}  // namespace

bool ScenarioReport::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0.0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string resolve_out_dir(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("ISOFLOW_OUT"); env && *env) return env;
  return "isoflow-out";
}

ScenarioReport run_scenario(const Scenario& sc, const std::string& out_dir) {
  const fs::path dir = fs::path(out_dir) / sc.name;
  fs::create_directories(dir);
  ScenarioReport rep;
  rep.name = sc.name;
  switch (sc.mode) {
    case Mode::lemma_suite: lemma_suite(sc, rep); break;
    case Mode::ode_flow: ode_flow(sc, dir, rep); break;
    case Mode::levelset_flow: levelset_flow(sc, dir, rep); break;
    case Mode::mass_table: mass_table(sc, dir, rep); break;
  }
  write_verdicts(dir, rep);
  return rep;
}

int run_scenarios(std::vector<Scenario> scenarios, const RunOptions& options, std::ostream& log) {
  int status = kOk;
  for (auto& sc : scenarios) {
    if (options.h) sc.grid.h = *options.h;
    if (options.dt) sc.time.dt = *options.dt;
    log << "[" << to_string(sc.mode) << "] " << sc.name << '\n';
    ScenarioReport rep;
    try {
      rep = run_scenario(sc, options.out_dir);
    } catch (const NumericalBlowup& e) {
      log << "  numerical blow-up: " << e.what()
          << "; last good sample t=" << format_double(e.last_good_time()) << '\n';
      return kBlowup;
    } catch (const DomainError& e) {
      log << "  invalid scenario: " << e.what() << '\n';
      return kBadConfig;
    }
    for (const auto& n : rep.notes) log << "  " << n << '\n';
    for (const auto& v : rep.verdicts) {
      log << "  " << (v.pass ? "PASS " : "FAIL ") << v.anchor << " slack=" << format_double(v.slack)
          << '\n';
    }
    if (!rep.passed()) status = kVerdictFailed;
  }
  return status;
}

int run_config_file(const std::string& path, const RunOptions& options, std::ostream& log) {
  std::vector<Scenario> scenarios;
  try {
    scenarios = load_config(path);
  } catch (const ConfigError& e) {
    log << "config error: " << path << ": " << e.what() << '\n';
    return kBadConfig;
  }
  return run_scenarios(std::move(scenarios), options, log);
}

std::vector<Scenario> builtin_suite() {
  std::vector<Scenario> out;
  for (double m : {0.5, 1.0, 2.0}) {
    Scenario s;
    s.name = "lemmas-m" + format_double(m);
    s.mode = Mode::lemma_suite;
    s.metric.m = m;
    out.push_back(s);
  }
  for (double m : {0.0, 1.0}) {
    Scenario s;
    s.name = m > 0.0 ? "ode-schwarzschild-m1" : "ode-euclidean";
    s.mode = Mode::ode_flow;
    s.metric.m = m;
    const double r0 = m > 0.0 ? 10.0 : 1.0;
    s.shape = ShapeSpec::sphere(r0);
    s.time.t_max = m > 0.0 ? 0.5 * r0 * r0 : 0.2 * r0 * r0;
    s.time.sample_interval = s.time.t_max / 100.0;
    out.push_back(s);
  }
  Scenario table;
  table.name = "mass-table-m1";
  table.mode = Mode::mass_table;
  table.metric.m = 1.0;
  table.radii = {2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000};
  out.push_back(table);
  return out;
}

}  // namespace isoflow::cli
