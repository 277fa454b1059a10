#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ekphd/bounds.hpp"
#include "ekphd/filter.hpp"
#include "ekphd/metrics.hpp"
#include "ekphd/motion.hpp"
#include "ekphd/sim.hpp"

namespace ekphd {

enum class RunMode { Slam, LosOnly };
enum class BoundMode { FullSlam, KnownMap };

/// Fully resolved experiment description. Defaults reproduce the circular-road
/// scenario (one BS, four VAs, four SPs, K = 40 steps per lap).
struct ExperimentConfig {
  std::size_t cycles = 1;
  std::size_t steps_per_cycle = 40;
  std::size_t mc_runs = 100;
  std::uint64_t seed = 1;
  int jobs = 1;
  RunMode mode = RunMode::Slam;
  std::string output_dir = "out";

  struct ScenarioSection {
    Vec3 bs{0.0, 0.0, 40.0};
    std::vector<Vec3> vas{Vec3(200, 0, 40), Vec3(0, 200, 40), Vec3(-200, 0, 40), Vec3(0, -200, 40)};
    std::vector<std::array<double, 2>> sp_xy{{65, 65}, {-65, 65}, {-65, -65}, {65, -65}};
    std::array<double, 2> sp_height_range{0.0, 40.0};
    double sp_visibility_radius = 50.0;
    double max_range = 200.0;
    double clutter_rate = 1.0;
    Vec5 meas_cov_diag = (Vec5() << 1e-2, 1e-4, 1e-4, 1e-4, 1e-4).finished();
    double ue_height = 0.0;
    bool noisy_truth = false;
  } scenario;

  struct MotionSection {
    double speed = 22.22;
    double turn_rate = 0.31415926535897931;  // pi / 10
    double dt = 0.5;
    Vec4 process_noise_diag = (Vec4() << 0.04, 0.04, 1e-6, 0.04).finished();
  } motion;

  struct InitialSection {
    std::optional<Vec4> x0;  // default [v / omega, 0, pi / 2, 300]
    Vec4 p0_diag = (Vec4() << 0.09, 0.09, 0.0052 * 0.0052, 0.09).finished();
  } initial;

  struct FilterSection {
    double p_d = 0.9;
    double p_s = 0.99;
    double p_b = 1e-6;
    double map_noise = 1e-4;
    double prune_threshold = 1e-6;
    double merge_threshold = 50.0;
    std::size_t cap = 50;
    double gate_tail = 1e-9;
    double clutter_rate = 1.0;
    double extraction_threshold = 0.5;
  } filter;

  struct BoundsSection {
    BoundMode mode = BoundMode::FullSlam;
    LandmarkNoise landmark_noise = LandmarkNoise::Map;
  } bounds;

  GospaParams gospa;

  Vec4 initial_state() const;
  Mat4 initial_covariance() const;
  MotionParams motion_params() const;
  FilterParams filter_params() const;
  BoundOptions bound_options(bool known_map) const;
  /// Scatterer heights are drawn from `seed`.
  Scenario make_scenario() const;
  std::size_t total_steps() const { return cycles * steps_per_cycle; }
};

/// Throws ConfigError on any out-of-range value.
void validate(const ExperimentConfig& cfg);

/// Parses JSON text; absent keys keep their defaults, unknown keys are
/// rejected. Errors carry line/column context.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::string& path);

nlohmann::json to_json(const ExperimentConfig& cfg);
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace ekphd
