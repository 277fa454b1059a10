// Serial reference vs OpenMP for the two parallel kernels: cost-matrix rows
// and Monte-Carlo runs.
#include <random>

#include <benchmark/benchmark.h>

#include "ekphd/experiment.hpp"

using namespace ekphd;

namespace {

struct CostInput {
  std::vector<GaussianComponent> comps;
  std::vector<Measurement> zs;
  VehicleState ue;
  AssociationContext ctx;
};

CostInput make_input(std::size_t n, std::size_t m) {
  CostInput in;
  const ExperimentConfig cfg;
  in.ue = {cfg.initial_state(), cfg.initial_covariance()};
  in.ctx = cfg.filter_params().association();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const bool sp = i % 2;
    GaussianComponent c;
    c.type = sp ? LandmarkType::SP : LandmarkType::VA;
    c.mean = sp ? Vec3(70 + 30 * u(rng), 30 * u(rng), 20 + 20 * u(rng)) : Vec3(200 + 5 * u(rng), 5 * u(rng), 40);
    c.cov = Mat3::Identity() * (0.2 + std::abs(u(rng)));
    in.comps.push_back(c);
  }
  for (std::size_t j = 0; j < m; ++j) {
    const auto& c = in.comps[j % n];
    Vec5 z = measure(in.ue.mean, c.mean, c.type, in.ctx.fov.bs);
    z(0) += 0.2 * u(rng);
    in.zs.push_back(z);
  }
  return in;
}

void BM_CostMatrixSerial(benchmark::State& state) {
  const auto in = make_input(static_cast<std::size_t>(state.range(0)), 16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_cost_matrix_serial(in.comps, in.ue, in.zs, in.ctx));
  }
}

void BM_CostMatrixParallel(benchmark::State& state) {
  const auto in = make_input(static_cast<std::size_t>(state.range(0)), 16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_cost_matrix(in.comps, in.ue, in.zs, in.ctx));
  }
}

void BM_MonteCarloSerial(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.mc_runs = static_cast<std::size_t>(state.range(0));
  const Scenario s = cfg.make_scenario();
  for (auto _ : state) benchmark::DoNotOptimize(run_monte_carlo_serial(cfg, s));
}

void BM_MonteCarloParallel(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.mc_runs = static_cast<std::size_t>(state.range(0));
  cfg.jobs = static_cast<int>(state.range(1));
  const Scenario s = cfg.make_scenario();
  for (auto _ : state) benchmark::DoNotOptimize(run_monte_carlo(cfg, s));
}

}  // namespace

BENCHMARK(BM_CostMatrixSerial)->Arg(16)->Arg(50)->Arg(200);
BENCHMARK(BM_CostMatrixParallel)->Arg(16)->Arg(50)->Arg(200);
BENCHMARK(BM_MonteCarloSerial)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Args({8, 1})->Args({8, 2})->Args({8, 4})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
