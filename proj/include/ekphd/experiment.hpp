#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ekphd/config.hpp"

namespace ekphd {

/// Simulated data of one Monte-Carlo run.
struct RunRecord {
  std::size_t run = 0;
  Vec4 initial_mean = Vec4::Zero();  // filter initialization drawn from N(x0, P0)
  std::vector<Vec4> truth;           // per step
  std::vector<std::vector<LabeledMeasurement>> measurements;
};

struct StepRecord {
  Vec4 truth = Vec4::Zero();
  Vec4 estimate = Vec4::Zero();
  GospaResult gospa;
  std::size_t n_landmarks = 0;  // extracted estimates
  double predict_ms = 0.0;
  double update_ms = 0.0;
};

struct RunResult {
  std::size_t run = 0;
  std::vector<StepRecord> steps;
};

struct BoundRow {
  std::size_t step = 0;  // 0 is the prior
  double peb_full_slam = 0.0;
  double peb_known_map = 0.0;
  std::vector<double> leb;  // per scenario landmark, NaN until seen
};

/// Per-run generator; runs are independent of scheduling.
std::mt19937_64 run_rng(std::uint64_t seed, std::size_t run);

/// Noise-free trajectory x_0 .. x_{N-1}.
std::vector<Vec4> truth_trajectory(const ExperimentConfig& cfg);

RunRecord simulate_run(const ExperimentConfig& cfg, const Scenario& scenario, std::size_t run);

/// Filter over a simulated record; timing covers prediction and update only.
RunResult run_filter(const ExperimentConfig& cfg, const Scenario& scenario, const RunRecord& rec);

RunResult run_single(const ExperimentConfig& cfg, const Scenario& scenario, std::size_t run);

/// Monte-Carlo runs across `cfg.jobs` OpenMP threads.
std::vector<RunResult> run_monte_carlo(const ExperimentConfig& cfg, const Scenario& scenario);
std::vector<RunResult> run_monte_carlo_serial(const ExperimentConfig& cfg,
                                              const Scenario& scenario);

/// Bounds along the noise-free trajectory; row 0 holds the prior.
std::vector<BoundRow> compute_bounds(const ExperimentConfig& cfg, const Scenario& scenario);

struct RmseRow {
  double position = 0.0;
  double heading = 0.0;
  double clock_bias = 0.0;
};
std::vector<RmseRow> aggregate_rmse(const std::vector<RunResult>& runs);

void write_rmse_csv(const std::string& path, const ExperimentConfig& cfg,
                    const std::vector<RunResult>& runs);
void write_gospa_csv(const std::string& path, const ExperimentConfig& cfg,
                     const std::vector<RunResult>& runs);
void write_timing_csv(const std::string& path, const ExperimentConfig& cfg,
                      const std::vector<RunResult>& runs);
void write_bounds_csv(const std::string& path, const ExperimentConfig& cfg,
                      const Scenario& scenario, const std::vector<BoundRow>& rows);
void write_simulation_csv(const std::string& truth_path, const std::string& meas_path,
                          const ExperimentConfig& cfg, const std::vector<RunRecord>& records);
void write_run_meta(const std::string& path, const ExperimentConfig& cfg,
                    const std::string& command, const std::vector<std::string>& outputs);

struct ExperimentOutputs {
  std::vector<RunResult> runs;
  std::vector<BoundRow> bounds;
  std::vector<std::string> files;
};

/// Runs the filter and/or the bound and writes the CSV files and
/// run_meta.json into cfg.output_dir.
ExperimentOutputs run_experiment(const ExperimentConfig& cfg, bool filter, bool bounds,
                                 const std::string& command = "experiment");

std::string version_string();

}  // namespace ekphd
