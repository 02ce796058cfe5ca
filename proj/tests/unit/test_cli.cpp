#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "isoflow/cli/config.hpp"
#include "isoflow/cli/runner.hpp"

using namespace isoflow::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("isoflow-cli-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write(const fs::path& dir, const std::string& name, const std::string& text) {
  std::ofstream(dir / name, std::ios::binary) << text;
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run_file(const fs::path& config, const fs::path& out, std::string* log_text = nullptr) {
  RunOptions options;
  options.out_dir = out.string();
  std::ostringstream log;
  const int code = run_config_file(config.string(), options, log);
  if (log_text) *log_text = log.str();
  return code;
}

const char* kSphere = R"({"scenarios": [{
  "name": "small-sphere", "mode": "levelset-flow",
  "metric": {"kind": "euclidean"},
  "shape": {"kind": "sphere", "r0": 1.0},
  "grid": {"h": 0.05},
  "time": {"t_max": 0.1, "sample_interval": 0.02}
}]})";

}  // namespace

TEST_CASE("config parsing") {
  const auto scenarios = parse_config(kSphere);
  REQUIRE(scenarios.size() == 1);
  CHECK(scenarios[0].mode == Mode::levelset_flow);
  CHECK(scenarios[0].grid.h == 0.05);
  CHECK_FALSE(scenarios[0].time.dt.has_value());
  CHECK(parse_config(R"({"scenarios": []})").empty());

  SUBCASE("syntax errors carry the line") {
    try {
      parse_config("{\n  \"scenarios\": [\n    {\"name\": \"x\",, }\n  ]\n}");
      FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  SUBCASE("field errors name the field") {
    try {
      parse_config(R"({"scenarios": [{"name": "a", "mode": "ode-flow", "metric": {"kind": "schwarzschild", "m": -1}}]})");
      FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("/scenarios/0/metric/m") != std::string::npos);
    }
  }
  CHECK_THROWS_AS(parse_config(R"({"scenarios": [{"name": "a", "mode": "lemma-suite", "metric": {"kind": "schwarzschild", "m": 1}, "colour": 1}]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"scenarios": [{"name": "a", "mode": "warp", "metric": {"kind": "euclidean"}}]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"scenarios": [{"name": "a", "mode": "levelset-flow", "metric": {"kind": "euclidean"}}]})"), ConfigError);
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("exit");
  CHECK(run_file(write(dir, "lemma.json", R"({"scenarios": [{"name": "l", "mode": "lemma-suite", "metric": {"kind": "schwarzschild", "m": 1}}]})"), dir / "out") == kOk);
  CHECK(fs::exists(dir / "out" / "l" / "verdicts.txt"));

  // C = 0 cannot bound qlm - m > 0 on Schwarzschild balls.
  CHECK(run_file(write(dir, "fail.json", R"({"scenarios": [{"name": "f", "mode": "mass-table", "metric": {"kind": "schwarzschild", "m": 1}, "radii": [5, 50], "tolerances": {"iso_adm_constant": 0}}]})"), dir / "out") == kVerdictFailed);
  const std::string verdicts = slurp(dir / "out" / "f" / "verdicts.txt");
  CHECK(verdicts.find("FAIL iso-adm-bound slack=-") != std::string::npos);

  std::string log;
  CHECK(run_file(write(dir, "bad.json", "{\"scenarios\": [\n}"), dir / "out", &log) == kBadConfig);
  CHECK(log.find("line 2") != std::string::npos);
  CHECK(run_file(dir / "missing.json", dir / "out") == kBadConfig);

  // dt ten times the stability limit, without reinitialisation, diverges.
  const fs::path unstable = write(dir, "unstable.json", R"({"scenarios": [{
    "name": "u", "mode": "levelset-flow", "metric": {"kind": "euclidean"},
    "shape": {"kind": "sphere", "r0": 2.0}, "grid": {"h": 0.1},
    "time": {"dt": 0.02, "t_max": 50.0, "sample_interval": 0.02, "reinit_every": 1000000}}]})");
  CHECK(run_file(unstable, dir / "out", &log) == kBlowup);
  CHECK(log.find("last good sample t=") != std::string::npos);
}

TEST_CASE("empty scenario list writes nothing") {
  const fs::path dir = scratch("empty");
  CHECK(run_file(write(dir, "empty.json", R"({"scenarios": []})"), dir / "out") == kOk);
  CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("output directory resolution") {
  CHECK(resolve_out_dir(std::string("given")) == "given");
  ::setenv("ISOFLOW_OUT", "from-env", 1);
  CHECK(resolve_out_dir(std::nullopt) == "from-env");
  ::unsetenv("ISOFLOW_OUT");
  CHECK(resolve_out_dir(std::nullopt) == "isoflow-out");
}

TEST_CASE("level-set artifacts are deterministic") {
  const fs::path dir = scratch("determinism");
  const fs::path config = write(dir, "sphere.json", kSphere);
  CHECK(run_file(config, dir / "a") == kOk);
  CHECK(run_file(config, dir / "b") == kOk);
  for (const char* name : {"trace.csv", "components.csv", "verdicts.txt"}) {
    const std::string a = slurp(dir / "a" / "small-sphere" / name);
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(dir / "b" / "small-sphere" / name));
  }
  const std::string trace = slurp(dir / "a" / "small-sphere" / "trace.csv");
  CHECK(trace.rfind("t,A_total,V_total,Q,ratio,n_components,n_frozen\n", 0) == 0);
  const std::string comps = slurp(dir / "a" / "small-sphere" / "components.csv");
  CHECK(comps.rfind("t,id,frozen,freeze_time,perimeter,volume,hawking\n", 0) == 0);
}

TEST_CASE("ode-flow scenario reports a small Q drift") {
  const fs::path dir = scratch("ode");
  std::string log;
  CHECK(run_file(write(dir, "ode.json", R"({"scenarios": [{"name": "o", "mode": "ode-flow", "metric": {"kind": "schwarzschild", "m": 1}, "shape": {"kind": "sphere", "r0": 10}, "time": {"t_max": 50, "sample_interval": 0.5}}]})"), dir / "out", &log) == kOk);
  CHECK(log.find("PASS flow-ode-q-drift") != std::string::npos);
}

TEST_CASE("built-in suite passes") {
  const fs::path dir = scratch("suite");
  RunOptions options;
  options.out_dir = dir.string();
  std::ostringstream log;
  CHECK(run_scenarios(builtin_suite(), options, log) == kOk);
  CHECK(log.str().find("PASS ratio-slope@36pi") != std::string::npos);
}

#ifdef ISOFLOW_CLI_PATH
#include <sys/wait.h>

TEST_CASE("executable") {
  const fs::path dir = scratch("exe");
  const std::string exe = ISOFLOW_CLI_PATH;
  auto status = [](const std::string& cmd) {
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  const fs::path empty = write(dir, "empty.json", R"({"scenarios": []})");
  CHECK(status(exe + " run " + empty.string() + " --out " + (dir / "o").string() + " > /dev/null") == 0);
  CHECK(status(exe + " run > /dev/null 2>&1") == 2);
  CHECK(status(exe + " run " + (dir / "nope.json").string() + " > /dev/null") == 2);
}
#endif
