#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "ekphd/errors.hpp"
#include "ekphd/experiment.hpp"

using namespace ekphd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ekphd_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_rows(const fs::path& p, const std::string& prefix) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::size_t n = 0;
  while (std::getline(in, line)) n += line.rfind(prefix, 0) == 0;
  return n;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(EKPHD_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("empty config gives the paper defaults") {
  const ExperimentConfig c = parse_config_text("{}");
  CHECK(c.steps_per_cycle == 40);
  CHECK(c.cycles == 1);
  CHECK(c.mc_runs == 100);
  CHECK(c.motion.speed == 22.22);
  CHECK(c.motion.turn_rate == doctest::Approx(M_PI / 10).epsilon(1e-15));
  CHECK(c.motion.dt == 0.5);
  CHECK(c.motion.process_noise_diag == Vec4(0.04, 0.04, 1e-6, 0.04));
  CHECK(c.initial.p0_diag == Vec4(0.09, 0.09, 0.0052 * 0.0052, 0.09));
  CHECK(c.initial_state()(0) == doctest::Approx(70.73).epsilon(1e-4));
  CHECK(c.initial_state()(3) == 300.0);
  CHECK(c.filter.p_d == 0.9);
  CHECK(c.filter.p_s == 0.99);
  CHECK(c.filter.p_b == 1e-6);
  CHECK(c.filter.map_noise == 1e-4);
  CHECK(c.filter.prune_threshold == 1e-6);
  CHECK(c.filter.merge_threshold == 50.0);
  CHECK(c.filter.cap == 50);
  CHECK(c.filter.gate_tail == 1e-9);
  CHECK(c.scenario.clutter_rate == 1.0);
  CHECK(c.scenario.sp_visibility_radius == 50.0);
  CHECK(c.scenario.max_range == 200.0);
  CHECK(c.mode == RunMode::Slam);

  const Scenario a = c.make_scenario();
  const Scenario b = default_scenario(c.seed);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a.sps[i] == b.sps[i]);
    CHECK(a.vas[i] == b.vas[i]);
  }
  CHECK(a.meas_cov == b.meas_cov);
}

TEST_CASE("validation and parse errors") {
  CHECK_THROWS_AS(parse_config_text(R"({"cycles": 0})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"mc_runs": 0})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"steps_per_cycle": 0})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"filter": {"p_d": 1.5}})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"gospa": {"alpha": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"mode": "fast"})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"filter": {"pd": 0.5}})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"motion": {"process_noise_diag": [1, 2]}})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"cycles": "two"})"), ConfigError);
  try {
    parse_config_text("{\n  \"cycles\": 2,\n  \"seed\": ,\n}");
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  try {
    parse_config_text(R"({"filter": {"pd": 0.5}})");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("pd") != std::string::npos);
  }
}

TEST_CASE("parse, serialize, parse is the identity") {
  const std::string text = R"({
    "cycles": 3, "steps_per_cycle": 12, "mc_runs": 7, "seed": 12345678901234, "jobs": 2,
    "mode": "los-only", "output_dir": "x/y",
    "scenario": {"clutter_rate": 0.5, "sp_xy": [[1, 2], [3, 4]], "noisy_truth": true,
                 "vas": [[1, 2, 3]]},
    "motion": {"speed": 10.5, "turn_rate": 0.1},
    "initial": {"x0": [1, 2, 0.5, 7]},
    "filter": {"p_d": 0.8, "cap": 20, "extraction_threshold": 0.4},
    "bounds": {"mode": "known-map", "landmark_noise": "identity"},
    "gospa": {"p": 1.5, "c": 10}
  })";
  const ExperimentConfig a = parse_config_text(text);
  const std::string s1 = serialize_config(a);
  const ExperimentConfig b = parse_config_text(s1);
  CHECK(serialize_config(b) == s1);
  CHECK(b.seed == 12345678901234ULL);
  CHECK(b.mode == RunMode::LosOnly);
  CHECK(b.bounds.mode == BoundMode::KnownMap);
  CHECK(b.bounds.landmark_noise == LandmarkNoise::Identity);
  CHECK(b.initial.x0.has_value());
  CHECK(b.scenario.vas.size() == 1);

  const ExperimentConfig d = parse_config_text("{}");
  CHECK(serialize_config(parse_config_text(serialize_config(d))) == serialize_config(d));
}

TEST_CASE("experiment writes every file with the expected rows") {
  ExperimentConfig c;
  c.mc_runs = 2;
  c.output_dir = scratch("exp").string();
  run_experiment(c, true, true);
  const fs::path dir(c.output_dir);
  for (const char* f : {"rmse.csv", "gospa.csv", "bounds.csv", "timing.csv", "run_meta.json"}) {
    CHECK(fs::exists(dir / f));
  }
  for (const char* f : {"rmse.csv", "gospa.csv", "timing.csv"}) {
    CHECK(count_rows(dir / f, "0,") == 40);
    CHECK(count_rows(dir / f, "1,") == 40);
    CHECK(count_rows(dir / f, "-1,") == 40);
  }
  CHECK(count_rows(dir / "bounds.csv", "-1,") == 41);
  CHECK(slurp(dir / "rmse.csv").rfind("run,cycle,step,k_in_cycle,", 0) == 0);

  const auto meta = nlohmann::json::parse(slurp(dir / "run_meta.json"));
  CHECK(meta["seed"] == c.seed);
  CHECK(meta["config"] == to_json(c));
}

TEST_CASE("same seed gives identical numeric output") {
  ExperimentConfig c;
  c.mc_runs = 3;
  c.jobs = 2;
  c.output_dir = scratch("det_a").string();
  run_experiment(c, true, true);
  ExperimentConfig d = c;
  d.jobs = 1;
  d.output_dir = scratch("det_b").string();
  run_experiment(d, true, true);
  for (const char* f : {"rmse.csv", "gospa.csv", "bounds.csv"}) {
    CHECK(slurp(fs::path(c.output_dir) / f) == slurp(fs::path(d.output_dir) / f));
  }
}

TEST_CASE("parallel Monte-Carlo equals the serial reference") {
  ExperimentConfig c;
  c.mc_runs = 4;
  c.jobs = 3;
  c.steps_per_cycle = 10;
  const Scenario s = c.make_scenario();
  const auto par = run_monte_carlo(c, s);
  const auto ser = run_monte_carlo_serial(c, s);
  REQUIRE(par.size() == ser.size());
  for (std::size_t r = 0; r < par.size(); ++r) {
    REQUIRE(par[r].steps.size() == ser[r].steps.size());
    for (std::size_t k = 0; k < par[r].steps.size(); ++k) {
      CHECK(par[r].steps[k].estimate == ser[r].steps[k].estimate);
      CHECK(par[r].steps[k].gospa.total == ser[r].steps[k].gospa.total);
    }
  }
}

TEST_CASE("los-only mode") {
  ExperimentConfig c;
  c.mc_runs = 2;
  c.mode = RunMode::LosOnly;
  c.output_dir = scratch("los").string();
  run_experiment(c, true, false);
  const fs::path dir(c.output_dir);
  CHECK(fs::exists(dir / "rmse.csv"));
  CHECK_FALSE(fs::exists(dir / "gospa.csv"));
}

TEST_CASE("command line exit codes") {
  const fs::path out = scratch("cli");
  CHECK(run_cli("version") == 0);
  CHECK(run_cli("run --runs 1 --cycles 1 --jobs 1 --seed 3 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "rmse.csv"));
  CHECK(run_cli("bound --out " + (out / "b").string()) == 0);
  CHECK(fs::exists(out / "b" / "bounds.csv"));
  CHECK(run_cli("simulate --runs 1 --out " + (out / "s").string()) == 0);
  CHECK(fs::exists(out / "s" / "measurements.csv"));
  CHECK(run_cli("experiment --runs 1 --mode los-only --out " + (out / "e").string()) == 0);
  CHECK_FALSE(fs::exists(out / "e" / "gospa.csv"));

  const fs::path bad = out / "bad.json";
  std::ofstream(bad) << R"({"cycles": 0})";
  CHECK(run_cli("run --config " + bad.string()) == 1);
  CHECK(run_cli("run --config " + (out / "missing.json").string()) == 1);
  CHECK(run_cli("run --mode sideways") == 1);

  // unwritable output directory
  const fs::path file = out / "plain";
  std::ofstream(file) << "x";
  CHECK(run_cli("bound --out " + (file / "sub").string()) == 2);
}
