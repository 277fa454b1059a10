#include "ekphd/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include <omp.h>

#include <nlohmann/json.hpp>

#include "ekphd/errors.hpp"

namespace ekphd {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  return out;
}

void write_index(std::ofstream& out, long run, const ExperimentConfig& cfg, std::size_t step) {
  // step is 1-based; cycle and k_in_cycle likewise.
  const std::size_t k = cfg.steps_per_cycle;
  const std::size_t cycle = step == 0 ? 0 : (step - 1) / k + 1;
  const std::size_t kin = step == 0 ? 0 : (step - 1) % k + 1;
  out << run << ',' << cycle << ',' << step << ',' << kin;
}

Vec4 sample_gaussian(const Vec4& mean, const Mat4& cov, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec4 w;
  for (int i = 0; i < 4; ++i) w(i) = gauss(rng);
  const Mat4 l = cov.llt().matrixL();
  return mean + l * w;
}

}  // namespace

std::mt19937_64 run_rng(std::uint64_t seed, std::size_t run) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(run), static_cast<std::uint32_t>(run >> 32)};
  return std::mt19937_64(seq);
}

std::vector<Vec4> truth_trajectory(const ExperimentConfig& cfg) {
  std::vector<Vec4> xs;
  const MotionParams m = cfg.motion_params();
  Vec4 x = cfg.initial_state();
  for (std::size_t k = 0; k < cfg.total_steps(); ++k) {
    xs.push_back(x);
    x = ct_transition(x, m);
  }
  return xs;
}

RunRecord simulate_run(const ExperimentConfig& cfg, const Scenario& scenario, std::size_t run) {
  auto rng = run_rng(cfg.seed, run);
  const MotionParams motion = cfg.motion_params();
  const Mat4 q_chol = cfg.motion.process_noise_diag.cwiseSqrt().asDiagonal();

  RunRecord rec;
  rec.run = run;
  Vec4 truth = cfg.initial_state();
  rec.initial_mean = sample_gaussian(truth, cfg.initial_covariance(), rng);

  MeasurementOptions mopts;
  mopts.p_d = cfg.filter.p_d;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t step = 1; step <= cfg.total_steps(); ++step) {
    if (step > 1) {
      truth = ct_transition(truth, motion);
      if (cfg.scenario.noisy_truth) {
        Vec4 w;
        for (int i = 0; i < 4; ++i) w(i) = gauss(rng);
        truth += q_chol * w;
        truth(2) = wrap_angle(truth(2));
      }
    }
    rec.truth.push_back(truth);
    rec.measurements.push_back(generate_measurements(truth, scenario, rng, mopts));
  }
  return rec;
}

RunResult run_filter(const ExperimentConfig& cfg, const Scenario& scenario, const RunRecord& rec) {
  const MotionParams motion = cfg.motion_params();
  const FilterParams params = cfg.filter_params();
  FilterState state = init(scenario.bs, VehicleState{rec.initial_mean, cfg.initial_covariance()});

  std::vector<Vec3> true_positions;
  for (const auto& lm : scenario.landmarks()) true_positions.push_back(lm.pos);

  RunResult res;
  res.run = rec.run;
  for (std::size_t k = 0; k < rec.truth.size(); ++k) {
    const auto zs = strip_labels(rec.measurements[k]);
    StepRecord out;
    out.truth = rec.truth[k];
    auto t0 = Clock::now();
    if (k > 0) state = predict(state, motion, params);
    out.predict_ms = elapsed_ms(t0);
    t0 = Clock::now();
    state = update(state, zs, params);
    out.update_ms = elapsed_ms(t0);

    out.estimate = state.ue.mean;
    std::vector<Vec3> est_pos;
    for (const auto& e : extract_landmarks(state.map, params.extraction_threshold)) {
      est_pos.push_back(e.pos);
    }
    out.n_landmarks = est_pos.size();
    if (cfg.mode == RunMode::Slam) out.gospa = gospa(true_positions, est_pos, cfg.gospa);
    res.steps.push_back(out);
  }
  return res;
}

RunResult run_single(const ExperimentConfig& cfg, const Scenario& scenario, std::size_t run) {
  return run_filter(cfg, scenario, simulate_run(cfg, scenario, run));
}

std::vector<RunResult> run_monte_carlo(const ExperimentConfig& cfg, const Scenario& scenario) {
  const auto n = static_cast<long>(cfg.mc_runs);
  std::vector<RunResult> out(cfg.mc_runs);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg.jobs)
  for (long r = 0; r < n; ++r) {
    try {
      out[static_cast<std::size_t>(r)] = run_single(cfg, scenario, static_cast<std::size_t>(r));
    } catch (...) {
#pragma omp critical(ekphd_mc_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<RunResult> run_monte_carlo_serial(const ExperimentConfig& cfg,
                                              const Scenario& scenario) {
  std::vector<RunResult> out;
  for (std::size_t r = 0; r < cfg.mc_runs; ++r) out.push_back(run_single(cfg, scenario, r));
  return out;
}

std::vector<BoundRow> compute_bounds(const ExperimentConfig& cfg, const Scenario& scenario) {
  const auto xs = truth_trajectory(cfg);
  const auto landmarks = scenario.landmarks();
  const MotionParams motion = cfg.motion_params();
  const BoundOptions full = cfg.bound_options(false);
  const BoundOptions known = cfg.bound_options(true);

  auto lebs = [&](const FimState& f) {
    std::vector<double> out;
    for (const auto& lm : landmarks) {
      out.push_back(f.landmark_offset.count(lm.id) ? leb(f, lm.id)
                                                   : std::numeric_limits<double>::quiet_NaN());
    }
    return out;
  };

  FimState jf = fim_init(cfg.initial_covariance());
  FimState jk = jf;
  std::vector<BoundRow> rows;
  rows.push_back({0, peb(jf), peb(jk), lebs(jf)});
  for (std::size_t step = 1; step <= xs.size(); ++step) {
    const Vec4& x = xs[step - 1];
    if (step == 1) {
      jf = fim_update(jf, x, landmarks, full);
      jk = fim_update(jk, x, landmarks, known);
    } else {
      jf = fim_step(jf, xs[step - 2], x, landmarks, motion, full);
      jk = fim_step(jk, xs[step - 2], x, landmarks, motion, known);
    }
    rows.push_back({step, peb(jf), peb(jk), lebs(jf)});
  }
  return rows;
}

std::vector<RmseRow> aggregate_rmse(const std::vector<RunResult>& runs) {
  if (runs.empty()) return {};
  const std::size_t n = runs.front().steps.size();
  std::vector<std::vector<double>> pos(runs.size()), head(runs.size()), bias(runs.size());
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (runs[r].steps.size() != n) throw LengthMismatch("runs differ in length");
    for (const auto& s : runs[r].steps) {
      pos[r].push_back((s.estimate.head<2>() - s.truth.head<2>()).norm());
      head[r].push_back(s.estimate(2) - s.truth(2));
      bias[r].push_back(s.estimate(3) - s.truth(3));
    }
  }
  const auto p = rmse_series(pos);
  const auto h = rmse_series(head, true);
  const auto b = rmse_series(bias);
  std::vector<RmseRow> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = {p[k], h[k], b[k]};
  return out;
}

void write_rmse_csv(const std::string& path, const ExperimentConfig& cfg,
                    const std::vector<RunResult>& runs) {
  auto out = open_csv(path);
  out << "run,cycle,step,k_in_cycle,position,heading,clock_bias\n";
  for (const auto& r : runs) {
    for (std::size_t k = 0; k < r.steps.size(); ++k) {
      const auto& s = r.steps[k];
      write_index(out, static_cast<long>(r.run), cfg, k + 1);
      out << ',' << num((s.estimate.head<2>() - s.truth.head<2>()).norm()) << ','
          << num(std::abs(wrap_angle(s.estimate(2) - s.truth(2)))) << ','
          << num(std::abs(s.estimate(3) - s.truth(3))) << '\n';
    }
  }
  const auto agg = aggregate_rmse(runs);
  for (std::size_t k = 0; k < agg.size(); ++k) {
    write_index(out, -1, cfg, k + 1);
    out << ',' << num(agg[k].position) << ',' << num(agg[k].heading) << ','
        << num(agg[k].clock_bias) << '\n';
  }
}

void write_gospa_csv(const std::string& path, const ExperimentConfig& cfg,
                     const std::vector<RunResult>& runs) {
  auto out = open_csv(path);
  out << "run,cycle,step,k_in_cycle,total,localization,missed,false_alarm,n_missed,n_false,"
         "n_estimates\n";
  const std::size_t n = runs.empty() ? 0 : runs.front().steps.size();
  std::vector<std::array<double, 7>> mean(n, std::array<double, 7>{});
  for (const auto& r : runs) {
    for (std::size_t k = 0; k < r.steps.size(); ++k) {
      const auto& g = r.steps[k].gospa;
      const std::array<double, 7> v{g.total,
                                    g.localization,
                                    g.missed,
                                    g.false_alarm,
                                    static_cast<double>(g.n_missed),
                                    static_cast<double>(g.n_false),
                                    static_cast<double>(r.steps[k].n_landmarks)};
      write_index(out, static_cast<long>(r.run), cfg, k + 1);
      out << ',' << num(v[0]) << ',' << num(v[1]) << ',' << num(v[2]) << ',' << num(v[3]) << ','
          << g.n_missed << ',' << g.n_false << ',' << r.steps[k].n_landmarks << '\n';
      for (std::size_t i = 0; i < v.size(); ++i) mean[k][i] += v[i] / static_cast<double>(runs.size());
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    write_index(out, -1, cfg, k + 1);
    for (double v : mean[k]) out << ',' << num(v);
    out << '\n';
  }
}

void write_timing_csv(const std::string& path, const ExperimentConfig& cfg,
                      const std::vector<RunResult>& runs) {
  auto out = open_csv(path);
  out << "run,cycle,step,k_in_cycle,predict_ms,update_ms,total_ms\n";
  const std::size_t n = runs.empty() ? 0 : runs.front().steps.size();
  std::vector<double> mp(n, 0.0), mu(n, 0.0);
  for (const auto& r : runs) {
    for (std::size_t k = 0; k < r.steps.size(); ++k) {
      const auto& s = r.steps[k];
      write_index(out, static_cast<long>(r.run), cfg, k + 1);
      out << ',' << num(s.predict_ms) << ',' << num(s.update_ms) << ','
          << num(s.predict_ms + s.update_ms) << '\n';
      mp[k] += s.predict_ms / static_cast<double>(runs.size());
      mu[k] += s.update_ms / static_cast<double>(runs.size());
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    write_index(out, -1, cfg, k + 1);
    out << ',' << num(mp[k]) << ',' << num(mu[k]) << ',' << num(mp[k] + mu[k]) << '\n';
  }
}

void write_bounds_csv(const std::string& path, const ExperimentConfig& cfg,
                      const Scenario& scenario, const std::vector<BoundRow>& rows) {
  auto out = open_csv(path);
  out << "run,cycle,step,k_in_cycle,peb,peb_full_slam,peb_known_map";
  const auto landmarks = scenario.landmarks();
  for (const auto& lm : landmarks) out << ",leb_" << lm.id;
  out << '\n';
  for (const auto& r : rows) {
    write_index(out, -1, cfg, r.step);
    const double selected =
        cfg.bounds.mode == BoundMode::FullSlam ? r.peb_full_slam : r.peb_known_map;
    out << ',' << num(selected) << ',' << num(r.peb_full_slam) << ',' << num(r.peb_known_map);
    for (double v : r.leb) out << ',' << num(v);
    out << '\n';
  }
}

void write_simulation_csv(const std::string& truth_path, const std::string& meas_path,
                          const ExperimentConfig& cfg, const std::vector<RunRecord>& records) {
  auto truth = open_csv(truth_path);
  truth << "run,cycle,step,k_in_cycle,x,y,heading,clock_bias\n";
  auto meas = open_csv(meas_path);
  meas << "run,cycle,step,k_in_cycle,origin,delay,doa_az,doa_el,dod_az,dod_el\n";
  for (const auto& r : records) {
    for (std::size_t k = 0; k < r.truth.size(); ++k) {
      write_index(truth, static_cast<long>(r.run), cfg, k + 1);
      for (int i = 0; i < 4; ++i) truth << ',' << num(r.truth[k](i));
      truth << '\n';
      for (const auto& z : r.measurements[k]) {
        write_index(meas, static_cast<long>(r.run), cfg, k + 1);
        meas << ',' << z.origin;
        for (int i = 0; i < 5; ++i) meas << ',' << num(z.z(i));
        meas << '\n';
      }
    }
  }
}

void write_run_meta(const std::string& path, const ExperimentConfig& cfg,
                    const std::string& command, const std::vector<std::string>& outputs) {
  nlohmann::json j;
  j["version"] = version_string();
  j["command"] = command;
  j["seed"] = cfg.seed;
  j["total_steps"] = cfg.total_steps();
  j["outputs"] = outputs;
  j["config"] = to_json(cfg);
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << '\n';
}

ExperimentOutputs run_experiment(const ExperimentConfig& cfg, bool filter, bool bounds,
                                 const std::string& command) {
  validate(cfg);
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);
  const Scenario scenario = cfg.make_scenario();

  ExperimentOutputs res;
  if (filter) {
    res.runs = run_monte_carlo(cfg, scenario);
    write_rmse_csv((dir / "rmse.csv").string(), cfg, res.runs);
    res.files.push_back("rmse.csv");
    if (cfg.mode == RunMode::Slam) {
      write_gospa_csv((dir / "gospa.csv").string(), cfg, res.runs);
      res.files.push_back("gospa.csv");
    }
    write_timing_csv((dir / "timing.csv").string(), cfg, res.runs);
    res.files.push_back("timing.csv");
  }
  if (bounds) {
    res.bounds = compute_bounds(cfg, scenario);
    write_bounds_csv((dir / "bounds.csv").string(), cfg, scenario, res.bounds);
    res.files.push_back("bounds.csv");
  }
  res.files.push_back("run_meta.json");
  write_run_meta((dir / "run_meta.json").string(), cfg, command, res.files);
  return res;
}

std::string version_string() { return "0.1.0"; }

}  // namespace ekphd
