#include "isoflow/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "isoflow/errors.hpp"

namespace isoflow::cli {

namespace {

using nlohmann::json;

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  std::ostringstream os;
  os << "line " << line << ", column " << column;
  return os.str();
}

// Typed access to one JSON object, rejecting unknown keys.
class Fields {
 public:
  Fields(const json& j, std::string path, std::set<std::string> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
    for (const auto& [key, value] : j_.items()) {
      (void)value;
      if (!allowed.count(key)) throw ConfigError(path_ + "/" + key, "unknown field");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string at(const std::string& key) const { return path_ + "/" + key; }
  const json& raw(const std::string& key) const { return j_.at(key); }

  double number(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_number()) throw ConfigError(at(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(at(key), "expected a finite number");
    return x;
  }
  double positive(const std::string& key) const {
    const double x = number(key);
    if (!(x > 0.0)) throw ConfigError(at(key), "expected a positive number");
    return x;
  }
  double non_negative(const std::string& key) const {
    const double x = number(key);
    if (!(x >= 0.0)) throw ConfigError(at(key), "expected a number >= 0");
    return x;
  }
  int positive_int(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 1000000) {
      throw ConfigError(at(key), "expected a positive integer");
    }
    return static_cast<int>(v.get<long long>());
  }
  std::string string(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_string()) throw ConfigError(at(key), "expected a string");
    return v.get<std::string>();
  }
  bool boolean(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_boolean()) throw ConfigError(at(key), "expected true or false");
    return v.get<bool>();
  }

 private:
  const json& require(const std::string& key) const {
    if (!j_.contains(key)) throw ConfigError(at(key), "missing required field");
    return j_.at(key);
  }

  const json& j_;
  std::string path_;
};

bool valid_name(const std::string& name) {
  if (name.empty() || name.size() > 100 || name == "." || name == "..") return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    if (!ok) return false;
  }
  return true;
}

Mode parse_mode(const Fields& f) {
  const std::string s = f.string("mode");
  if (s == "lemma-suite") return Mode::lemma_suite;
  if (s == "ode-flow") return Mode::ode_flow;
  if (s == "levelset-flow") return Mode::levelset_flow;
  if (s == "mass-table") return Mode::mass_table;
  throw ConfigError(f.at("mode"),
                    "expected one of lemma-suite, ode-flow, levelset-flow, mass-table");
}

MetricSpec parse_metric(const json& j, const std::string& path) {
  const Fields f(j, path, {"kind", "m"});
  MetricSpec spec;
  const std::string kind = f.string("kind");
  if (kind == "euclidean") {
    if (f.has("m") && f.number("m") != 0.0) {
      throw ConfigError(f.at("m"), "the euclidean metric has m = 0");
    }
  } else if (kind == "schwarzschild") {
    spec.m = f.non_negative("m");
  } else {
    throw ConfigError(f.at("kind"), "expected euclidean or schwarzschild");
  }
  return spec;
}

ShapeSpec parse_shape(const json& j, const std::string& path) {
  const Fields f(j, path,
                 {"kind", "r0", "center_z", "ball_radius", "separation", "neck_radius", "a", "b"});
  const std::string kind = f.string("kind");
  try {
    if (kind == "sphere") {
      return ShapeSpec::sphere(f.positive("r0"), f.has("center_z") ? f.number("center_z") : 0.0);
    }
    if (kind == "dumbbell") {
      return ShapeSpec::dumbbell(f.positive("ball_radius"), f.positive("separation"),
                                 f.positive("neck_radius"));
    }
    if (kind == "oval") {
      return ShapeSpec::oval(f.positive("a"), f.positive("b"),
                             f.has("center_z") ? f.number("center_z") : 0.0);
    }
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(f.at("kind"), "expected sphere, dumbbell or oval");
}

GridSpec parse_grid(const json& j, const std::string& path) {
  const Fields f(j, path, {"h", "margin_cells", "rho_max", "z_min", "z_max"});
  GridSpec g;
  g.h = f.positive("h");
  if (f.has("margin_cells")) g.margin_cells = f.positive_int("margin_cells");
  if (f.has("rho_max")) g.rho_max = f.positive("rho_max");
  if (f.has("z_min")) g.z_min = f.number("z_min");
  if (f.has("z_max")) g.z_max = f.number("z_max");
  if (g.z_min.has_value() != g.z_max.has_value()) {
    throw ConfigError(path, "z_min and z_max must be given together");
  }
  if (g.z_min && !(*g.z_max > *g.z_min)) throw ConfigError(f.at("z_max"), "must exceed z_min");
  return g;
}

TimeSpec parse_time(const json& j, const std::string& path) {
  const Fields f(j, path, {"dt", "t_max", "sample_interval", "sweep_every", "reinit_every"});
  TimeSpec t;
  if (f.has("dt")) {
    const json& v = f.raw("dt");
    if (v.is_string()) {
      if (v.get<std::string>() != "auto") throw ConfigError(f.at("dt"), "expected a number or \"auto\"");
    } else {
      t.dt = f.positive("dt");
    }
  }
  if (f.has("t_max")) t.t_max = f.positive("t_max");
  if (f.has("sample_interval")) t.sample_interval = f.positive("sample_interval");
  if (f.has("sweep_every")) t.sweep_every = f.positive_int("sweep_every");
  if (f.has("reinit_every")) t.reinit_every = f.positive_int("reinit_every");
  return t;
}

Tolerances parse_tolerances(const json& j, const std::string& path) {
  const Fields f(j, path,
                 {"q_drift", "drift_reduction", "area_rate", "q_slack", "perimeter_slack",
                  "ratio_growth", "q_zero", "resolved_cells", "freeze_margin", "hawking_margin",
                  "volume_constant_factor", "iso_adm_constant"});
  Tolerances t;
  if (f.has("q_drift")) t.q_drift = f.positive("q_drift");
  if (f.has("drift_reduction")) t.drift_reduction = f.positive("drift_reduction");
  if (f.has("area_rate")) t.area_rate = f.positive("area_rate");
  if (f.has("q_slack")) t.q_slack = f.non_negative("q_slack");
  if (f.has("perimeter_slack")) t.perimeter_slack = f.non_negative("perimeter_slack");
  if (f.has("ratio_growth")) t.ratio_growth = f.non_negative("ratio_growth");
  if (f.has("q_zero")) t.q_zero = f.non_negative("q_zero");
  if (f.has("resolved_cells")) t.resolved_cells = f.non_negative("resolved_cells");
  if (f.has("freeze_margin")) t.freeze_margin = f.non_negative("freeze_margin");
  if (f.has("hawking_margin")) t.hawking_margin = f.non_negative("hawking_margin");
  if (f.has("volume_constant_factor")) t.volume_constant_factor = f.positive("volume_constant_factor");
  if (f.has("iso_adm_constant")) t.iso_adm_constant = f.non_negative("iso_adm_constant");
  return t;
}

Scenario parse_scenario(const json& j, const std::string& path) {
  const Fields f(j, path,
                 {"name", "mode", "metric", "shape", "grid", "time", "threshold_mass",
                  "tolerances", "radii", "write_arrival"});
  Scenario s;
  s.name = f.string("name");
  if (!valid_name(s.name)) {
    throw ConfigError(f.at("name"), "names may only use letters, digits, '-', '_' and '.'");
  }
  s.mode = parse_mode(f);
  if (!f.has("metric")) throw ConfigError(f.at("metric"), "missing required field");
  s.metric = parse_metric(f.raw("metric"), f.at("metric"));
  if (f.has("shape")) s.shape = parse_shape(f.raw("shape"), f.at("shape"));
  if (f.has("grid")) s.grid = parse_grid(f.raw("grid"), f.at("grid"));
  if (f.has("time")) s.time = parse_time(f.raw("time"), f.at("time"));
  if (f.has("threshold_mass")) s.threshold_mass = f.non_negative("threshold_mass");
  if (f.has("tolerances")) s.tolerances = parse_tolerances(f.raw("tolerances"), f.at("tolerances"));
  if (f.has("write_arrival")) s.write_arrival = f.boolean("write_arrival");
  if (f.has("radii")) {
    const json& r = f.raw("radii");
    if (!r.is_array() || r.empty()) throw ConfigError(f.at("radii"), "expected a non-empty array");
    for (std::size_t k = 0; k < r.size(); ++k) {
      const std::string at = f.at("radii") + "/" + std::to_string(k);
      if (!r[k].is_number() || !(r[k].get<double>() > 0.0)) {
        throw ConfigError(at, "expected a positive number");
      }
      s.radii.push_back(r[k].get<double>());
      if (k > 0 && !(s.radii[k] > s.radii[k - 1])) throw ConfigError(at, "radii must increase");
    }
  }

  switch (s.mode) {
    case Mode::lemma_suite:
      if (!(s.metric.m > 0.0)) throw ConfigError(f.at("metric") + "/m", "lemma-suite needs m > 0");
      break;
    case Mode::ode_flow:
      if (!s.shape || s.shape->kind != ShapeSpec::Kind::sphere || s.shape->center_z != 0.0) {
        throw ConfigError(f.at("shape"), "ode-flow needs a sphere centred at the origin");
      }
      if (!f.has("time")) throw ConfigError(f.at("time"), "missing required field");
      break;
    case Mode::levelset_flow:
      if (!s.shape) throw ConfigError(f.at("shape"), "missing required field");
      if (!f.has("grid")) throw ConfigError(f.at("grid"), "missing required field");
      if (!f.has("time")) throw ConfigError(f.at("time"), "missing required field");
      break;
    case Mode::mass_table:
      if (s.radii.empty()) throw ConfigError(f.at("radii"), "missing required field");
      if (s.radii.front() <= s.metric.build().horizon_radius()) {
        throw ConfigError(f.at("radii") + "/0", "radii must lie outside the horizon");
      }
      break;
  }
  return s;
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::lemma_suite: return "lemma-suite";
    case Mode::ode_flow: return "ode-flow";
    case Mode::levelset_flow: return "levelset-flow";
    case Mode::mass_table: return "mass-table";
  }
  return "?";
}

std::vector<Scenario> parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(line_column(text, e.byte > 0 ? e.byte - 1 : 0), "syntax error");
  }
  const Fields top(root, "", {"scenarios"});
  if (!top.has("scenarios") || !root.at("scenarios").is_array()) {
    throw ConfigError("/scenarios", "expected an array of scenarios");
  }
  std::vector<Scenario> out;
  std::set<std::string> names;
  const json& list = root.at("scenarios");
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string path = "/scenarios/" + std::to_string(k);
    out.push_back(parse_scenario(list[k], path));
    if (!names.insert(out.back().name).second) {
      throw ConfigError(path + "/name", "duplicate scenario name");
    }
  }
  return out;
}

std::vector<Scenario> load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot read file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace isoflow::cli
