// Serial reference vs. OpenMP kernels. Run with OMP_NUM_THREADS set to
// compare scaling; every pair must produce identical results.

#include <benchmark/benchmark.h>

#include <optional>
#include <vector>

#include "motirr/detection.hpp"
#include "motirr/resonator.hpp"
#include "motirr/welcher_weg.hpp"

namespace {

void BM_EfficiencySweepSerial(benchmark::State& state) {
  const std::vector<double> rs = motirr::figure_reflectivities();
  for (auto _ : state) {
    benchmark::DoNotOptimize(motirr::serial::efficiency_sweep(rs, static_cast<std::uint64_t>(state.range(0))));
  }
}
BENCHMARK(BM_EfficiencySweepSerial)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_EfficiencySweepParallel(benchmark::State& state) {
  const std::vector<double> rs = motirr::figure_reflectivities();
  for (auto _ : state) {
    benchmark::DoNotOptimize(motirr::efficiency_sweep(rs, static_cast<std::uint64_t>(state.range(0))));
  }
}
BENCHMARK(BM_EfficiencySweepParallel)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

motirr::TrialRunner make_runner() {
  motirr::ProtocolConfig config;
  config.resonator.reflectivity = 0.999;
  config.rng_seed = 7;
  return motirr::TrialRunner(config);
}

void BM_TrialsSerial(benchmark::State& state) {
  const motirr::TrialRunner runner = make_runner();
  for (auto _ : state) {
    benchmark::DoNotOptimize(motirr::serial::run_trials(runner, true, static_cast<std::uint64_t>(state.range(0))));
  }
}
BENCHMARK(BM_TrialsSerial)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_TrialsParallel(benchmark::State& state) {
  const motirr::TrialRunner runner = make_runner();
  for (auto _ : state) {
    benchmark::DoNotOptimize(motirr::run_trials(runner, true, static_cast<std::uint64_t>(state.range(0))));
  }
}
BENCHMARK(BM_TrialsParallel)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_FringesSerial(benchmark::State& state) {
  motirr::PathMonitor monitor;
  monitor.tagging_probability = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(motirr::serial::simulate_run({}, {}, monitor,
                                                          static_cast<std::uint64_t>(state.range(0)), 240, 3));
  }
}
BENCHMARK(BM_FringesSerial)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_FringesParallel(benchmark::State& state) {
  motirr::PathMonitor monitor;
  monitor.tagging_probability = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        motirr::simulate_run({}, {}, monitor, static_cast<std::uint64_t>(state.range(0)), 240, 3));
  }
}
BENCHMARK(BM_FringesParallel)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
