// Microbenchmarks for the hot paths: the pick-freeze statistic, the pilot
// variance estimators, the quantile, plan optimization, and path simulation.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "mfsobol/driver.hpp"
#include "mfsobol/estimator.hpp"
#include "mfsobol/heston.hpp"
#include "mfsobol/model.hpp"
#include "mfsobol/planner.hpp"

namespace {

double u01(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

mfsobol::PairedSample make_sample(std::size_t n) {
  std::mt19937_64 gen(42);
  mfsobol::PairedSample s;
  s.y.resize(n);
  s.y_prime.resize(n);
  s.yc.emplace(n);
  s.yc_prime.emplace(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double common = u01(gen) - 0.5;
    s.y[i] = common + 0.5 * (u01(gen) - 0.5);
    s.y_prime[i] = common + 0.5 * (u01(gen) - 0.5);
    (*s.yc)[i] = s.y[i] + 0.1 * (u01(gen) - 0.5);
    (*s.yc_prime)[i] = s.y_prime[i] + 0.1 * (u01(gen) - 0.5);
  }
  return s;
}

void BM_PickFreezeStatistic(benchmark::State& state) {
  const mfsobol::PairedSample s = make_sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mfsobol::pick_freeze_statistic(s.y, s.y_prime));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PickFreezeStatistic)->Arg(1000)->Arg(100000);

void BM_EstimateAll(benchmark::State& state) {
  const mfsobol::PairedSample s = make_sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mfsobol::estimate_all(s));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateAll)->Arg(1000)->Arg(100000);

void BM_GaussianQuantile(benchmark::State& state) {
  double a = 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mfsobol::gaussian_quantile(a));
    a = a < 0.5 ? a * 1.001 : 1e-6;
  }
}
BENCHMARK(BM_GaussianQuantile);

void BM_OptimizePlan(benchmark::State& state) {
  mfsobol::VarianceEstimates est;
  est.sigma_t_eta = 0.8491;
  est.sigma_c = 0.9017;
  est.sigma_e = 0.4909;
  est.var_y = 1.0;
  est.var_yc = 1.0;
  est.pilot_size = 100;
  mfsobol::CostModel cost;
  cost.rho = 0.5;
  cost.hierarchical = true;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mfsobol::optimize_plan(
        0.05, 0.1, est, cost, mfsobol::SplitMode::kPaperFigure));
  }
}
BENCHMARK(BM_OptimizePlan);

void BM_HestonPaths(benchmark::State& state) {
  mfsobol::HestonParams params;
  params.h = 0.01;  // 25 steps
  const auto n_paths = static_cast<std::int64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        mfsobol::heston_terminal_prices(params, n_paths, 7));
  }
  state.SetItemsProcessed(state.iterations() * n_paths * params.steps());
}
BENCHMARK(BM_HestonPaths)->Arg(1000);

void BM_LinearGaussianPilot(benchmark::State& state) {
  const std::unique_ptr<mfsobol::Model> model =
      mfsobol::make_model("linear-gaussian");
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mfsobol::run_pilot(*model, n, 3));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_LinearGaussianPilot)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
