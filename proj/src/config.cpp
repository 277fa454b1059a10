#include "ekphd/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ekphd/errors.hpp"

namespace ekphd {

using nlohmann::json;

namespace {

std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  std::ostringstream os;
  os << "line " << line << ", column " << col;
  return os.str();
}

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key \"" + k + "\"");
  }
}

template <typename T>
void read(const json& obj, const char* key, const std::string& where, T& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <int N>
void read_vec(const json& obj, const char* key, const std::string& where,
              Eigen::Matrix<double, N, 1>& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  std::vector<double> v;
  read(obj, key, where, v);
  if (v.size() != N) {
    throw ConfigError(where + "." + key + ": expected " + std::to_string(N) + " numbers");
  }
  for (int i = 0; i < N; ++i) out(i) = v[static_cast<std::size_t>(i)];
}

template <int N>
std::vector<double> as_vector(const Eigen::Matrix<double, N, 1>& v) {
  return {v.data(), v.data() + N};
}

RunMode parse_mode(const std::string& s) {
  if (s == "slam") return RunMode::Slam;
  if (s == "los-only") return RunMode::LosOnly;
  throw ConfigError("mode: expected \"slam\" or \"los-only\", got \"" + s + "\"");
}

std::string mode_name(RunMode m) { return m == RunMode::Slam ? "slam" : "los-only"; }

BoundMode parse_bound_mode(const std::string& s) {
  if (s == "full-slam") return BoundMode::FullSlam;
  if (s == "known-map") return BoundMode::KnownMap;
  throw ConfigError("bounds.mode: expected \"full-slam\" or \"known-map\", got \"" + s + "\"");
}

std::string bound_mode_name(BoundMode m) { return m == BoundMode::FullSlam ? "full-slam" : "known-map"; }

LandmarkNoise parse_noise(const std::string& s) {
  if (s == "map") return LandmarkNoise::Map;
  if (s == "identity") return LandmarkNoise::Identity;
  if (s == "zero") return LandmarkNoise::Zero;
  throw ConfigError("bounds.landmark_noise: expected \"map\", \"identity\" or \"zero\", got \"" + s + "\"");
}

std::string noise_name(LandmarkNoise n) {
  switch (n) {
    case LandmarkNoise::Map: return "map";
    case LandmarkNoise::Identity: return "identity";
    case LandmarkNoise::Zero: return "zero";
  }
  return "map";
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

void from_json_object(const json& j, ExperimentConfig& c) {
  reject_unknown(j, "config",
                 {"cycles", "steps_per_cycle", "mc_runs", "seed", "jobs", "mode", "output_dir",
                  "scenario", "motion", "initial", "filter", "bounds", "gospa"});
  read(j, "cycles", "config", c.cycles);
  read(j, "steps_per_cycle", "config", c.steps_per_cycle);
  read(j, "mc_runs", "config", c.mc_runs);
  read(j, "seed", "config", c.seed);
  read(j, "jobs", "config", c.jobs);
  read(j, "output_dir", "config", c.output_dir);
  if (j.contains("mode")) {
    std::string m;
    read(j, "mode", "config", m);
    c.mode = parse_mode(m);
  }

  if (const auto it = j.find("scenario"); it != j.end()) {
    const json& s = *it;
    const std::string w = "scenario";
    reject_unknown(s, w,
                   {"bs", "vas", "sp_xy", "sp_height_range", "sp_visibility_radius", "max_range",
                    "clutter_rate", "meas_cov_diag", "ue_height", "noisy_truth"});
    read_vec<3>(s, "bs", w, c.scenario.bs);
    if (s.contains("vas")) {
      std::vector<std::array<double, 3>> v;
      read(s, "vas", w, v);
      c.scenario.vas.clear();
      for (const auto& a : v) c.scenario.vas.emplace_back(a[0], a[1], a[2]);
    }
    read(s, "sp_xy", w, c.scenario.sp_xy);
    read(s, "sp_height_range", w, c.scenario.sp_height_range);
    read(s, "sp_visibility_radius", w, c.scenario.sp_visibility_radius);
    read(s, "max_range", w, c.scenario.max_range);
    read(s, "clutter_rate", w, c.scenario.clutter_rate);
    read_vec<5>(s, "meas_cov_diag", w, c.scenario.meas_cov_diag);
    read(s, "ue_height", w, c.scenario.ue_height);
    read(s, "noisy_truth", w, c.scenario.noisy_truth);
  }

  if (const auto it = j.find("motion"); it != j.end()) {
    const json& m = *it;
    const std::string w = "motion";
    reject_unknown(m, w, {"speed", "turn_rate", "dt", "process_noise_diag"});
    read(m, "speed", w, c.motion.speed);
    read(m, "turn_rate", w, c.motion.turn_rate);
    read(m, "dt", w, c.motion.dt);
    read_vec<4>(m, "process_noise_diag", w, c.motion.process_noise_diag);
  }

  if (const auto it = j.find("initial"); it != j.end()) {
    const json& i = *it;
    const std::string w = "initial";
    reject_unknown(i, w, {"x0", "p0_diag"});
    if (i.contains("x0")) {
      if (i["x0"].is_null()) {
        c.initial.x0.reset();
      } else {
        Vec4 x;
        read_vec<4>(i, "x0", w, x);
        c.initial.x0 = x;
      }
    }
    read_vec<4>(i, "p0_diag", w, c.initial.p0_diag);
  }

  if (const auto it = j.find("filter"); it != j.end()) {
    const json& f = *it;
    const std::string w = "filter";
    reject_unknown(f, w,
                   {"p_d", "p_s", "p_b", "map_noise", "prune_threshold", "merge_threshold", "cap",
                    "gate_tail", "clutter_rate", "extraction_threshold"});
    read(f, "p_d", w, c.filter.p_d);
    read(f, "p_s", w, c.filter.p_s);
    read(f, "p_b", w, c.filter.p_b);
    read(f, "map_noise", w, c.filter.map_noise);
    read(f, "prune_threshold", w, c.filter.prune_threshold);
    read(f, "merge_threshold", w, c.filter.merge_threshold);
    read(f, "cap", w, c.filter.cap);
    read(f, "gate_tail", w, c.filter.gate_tail);
    read(f, "clutter_rate", w, c.filter.clutter_rate);
    read(f, "extraction_threshold", w, c.filter.extraction_threshold);
  }

  if (const auto it = j.find("bounds"); it != j.end()) {
    const json& b = *it;
    reject_unknown(b, "bounds", {"mode", "landmark_noise"});
    if (b.contains("mode")) {
      std::string s;
      read(b, "mode", "bounds", s);
      c.bounds.mode = parse_bound_mode(s);
    }
    if (b.contains("landmark_noise")) {
      std::string s;
      read(b, "landmark_noise", "bounds", s);
      c.bounds.landmark_noise = parse_noise(s);
    }
  }

  if (const auto it = j.find("gospa"); it != j.end()) {
    const json& g = *it;
    reject_unknown(g, "gospa", {"p", "c", "alpha"});
    read(g, "p", "gospa", c.gospa.p);
    read(g, "c", "gospa", c.gospa.c);
    read(g, "alpha", "gospa", c.gospa.alpha);
  }
}

}  // namespace

Vec4 ExperimentConfig::initial_state() const {
  if (initial.x0) return *initial.x0;
  return Vec4(motion.speed / motion.turn_rate, 0.0, std::numbers::pi / 2.0, 300.0);
}

Mat4 ExperimentConfig::initial_covariance() const { return initial.p0_diag.asDiagonal(); }

MotionParams ExperimentConfig::motion_params() const {
  MotionParams p;
  p.speed = motion.speed;
  p.turn_rate = motion.turn_rate;
  p.dt = motion.dt;
  p.process_noise = motion.process_noise_diag.asDiagonal();
  return p;
}

Scenario ExperimentConfig::make_scenario() const {
  Scenario s;
  s.bs = scenario.bs;
  s.vas = scenario.vas;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> height(scenario.sp_height_range[0],
                                                scenario.sp_height_range[1]);
  for (const auto& xy : scenario.sp_xy) s.sps.emplace_back(xy[0], xy[1], height(rng));
  s.sp_visibility_radius = scenario.sp_visibility_radius;
  s.max_range = scenario.max_range;
  s.clutter_rate = scenario.clutter_rate;
  s.meas_cov = scenario.meas_cov_diag.asDiagonal();
  s.ue_height = scenario.ue_height;
  return s;
}

FilterParams ExperimentConfig::filter_params() const {
  FilterParams p;
  p.p_d = filter.p_d;
  p.p_s = filter.p_s;
  p.p_b = filter.p_b;
  p.map_noise = filter.map_noise;
  p.prune_log_threshold = std::log(filter.prune_threshold);
  p.merge_threshold = filter.merge_threshold;
  p.cap = filter.cap;
  p.gate_tail = filter.gate_tail;
  p.clutter_rate = filter.clutter_rate;
  p.extraction_threshold = filter.extraction_threshold;
  p.births = mode == RunMode::Slam;
  p.fov = make_scenario().fov();
  p.meas_cov = scenario.meas_cov_diag.asDiagonal();
  return p;
}

BoundOptions ExperimentConfig::bound_options(bool known_map) const {
  BoundOptions o;
  o.fov = make_scenario().fov();
  o.p_d = filter.p_d;
  o.meas_cov = scenario.meas_cov_diag.asDiagonal();
  o.landmark_noise = bounds.landmark_noise;
  o.map_noise = filter.map_noise;
  o.known_map = known_map;
  return o;
}

void validate(const ExperimentConfig& c) {
  require(c.cycles >= 1, "cycles must be >= 1");
  require(c.steps_per_cycle >= 1, "steps_per_cycle must be >= 1");
  require(c.mc_runs >= 1, "mc_runs must be >= 1");
  require(c.jobs >= 1, "jobs must be >= 1");
  require(!c.output_dir.empty(), "output_dir must not be empty");
  require(c.scenario.sp_visibility_radius > 0.0, "scenario.sp_visibility_radius must be > 0");
  require(c.scenario.max_range > 0.0, "scenario.max_range must be > 0");
  require(c.scenario.clutter_rate >= 0.0, "scenario.clutter_rate must be >= 0");
  require(c.scenario.sp_height_range[0] <= c.scenario.sp_height_range[1],
          "scenario.sp_height_range must be ordered");
  require((c.scenario.meas_cov_diag.array() > 0.0).all(), "scenario.meas_cov_diag must be > 0");
  require(c.motion.dt > 0.0, "motion.dt must be > 0");
  require((c.motion.process_noise_diag.array() >= 0.0).all(),
          "motion.process_noise_diag must be >= 0");
  require((c.initial.p0_diag.array() > 0.0).all(), "initial.p0_diag must be > 0");
  require(c.initial.x0.has_value() || std::abs(c.motion.turn_rate) > 0.0,
          "initial.x0 is required when motion.turn_rate is 0");
  require(is_probability(c.filter.p_d), "filter.p_d must be in [0, 1]");
  require(is_probability(c.filter.p_s), "filter.p_s must be in [0, 1]");
  require(c.filter.p_b > 0.0 && c.filter.p_b <= 1.0, "filter.p_b must be in (0, 1]");
  require(c.filter.map_noise >= 0.0, "filter.map_noise must be >= 0");
  require(c.filter.prune_threshold > 0.0, "filter.prune_threshold must be > 0");
  require(c.filter.merge_threshold >= 0.0, "filter.merge_threshold must be >= 0");
  require(c.filter.cap >= 1, "filter.cap must be >= 1");
  require(c.filter.gate_tail > 0.0 && c.filter.gate_tail < 1.0, "filter.gate_tail must be in (0, 1)");
  require(c.filter.clutter_rate > 0.0, "filter.clutter_rate must be > 0");
  require(c.filter.extraction_threshold > 0.0, "filter.extraction_threshold must be > 0");
  require(c.gospa.p >= 1.0, "gospa.p must be >= 1");
  require(c.gospa.c > 0.0, "gospa.c must be > 0");
  require(c.gospa.alpha == 2.0, "gospa.alpha must be 2");
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error at " + line_context(text, e.byte > 0 ? e.byte - 1 : 0) +
                      ": " + e.what());
  }
  ExperimentConfig c;
  from_json_object(j, c);
  validate(c);
  return c;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["cycles"] = c.cycles;
  j["steps_per_cycle"] = c.steps_per_cycle;
  j["mc_runs"] = c.mc_runs;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  j["mode"] = mode_name(c.mode);
  j["output_dir"] = c.output_dir;

  std::vector<std::array<double, 3>> vas;
  for (const auto& v : c.scenario.vas) vas.push_back({v(0), v(1), v(2)});
  j["scenario"] = {{"bs", as_vector<3>(c.scenario.bs)},
                   {"vas", vas},
                   {"sp_xy", c.scenario.sp_xy},
                   {"sp_height_range", c.scenario.sp_height_range},
                   {"sp_visibility_radius", c.scenario.sp_visibility_radius},
                   {"max_range", c.scenario.max_range},
                   {"clutter_rate", c.scenario.clutter_rate},
                   {"meas_cov_diag", as_vector<5>(c.scenario.meas_cov_diag)},
                   {"ue_height", c.scenario.ue_height},
                   {"noisy_truth", c.scenario.noisy_truth}};
  j["motion"] = {{"speed", c.motion.speed},
                 {"turn_rate", c.motion.turn_rate},
                 {"dt", c.motion.dt},
                 {"process_noise_diag", as_vector<4>(c.motion.process_noise_diag)}};
  j["initial"] = {{"x0", c.initial.x0 ? json(as_vector<4>(*c.initial.x0)) : json(nullptr)},
                  {"p0_diag", as_vector<4>(c.initial.p0_diag)}};
  j["filter"] = {{"p_d", c.filter.p_d},
                 {"p_s", c.filter.p_s},
                 {"p_b", c.filter.p_b},
                 {"map_noise", c.filter.map_noise},
                 {"prune_threshold", c.filter.prune_threshold},
                 {"merge_threshold", c.filter.merge_threshold},
                 {"cap", c.filter.cap},
                 {"gate_tail", c.filter.gate_tail},
                 {"clutter_rate", c.filter.clutter_rate},
                 {"extraction_threshold", c.filter.extraction_threshold}};
  j["bounds"] = {{"mode", bound_mode_name(c.bounds.mode)},
                 {"landmark_noise", noise_name(c.bounds.landmark_noise)}};
  j["gospa"] = {{"p", c.gospa.p}, {"c", c.gospa.c}, {"alpha", c.gospa.alpha}};
  return j;
}

std::string serialize_config(const ExperimentConfig& cfg) { return to_json(cfg).dump(2); }

}  // namespace ekphd
