// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include <vector>

#include "faultroute/kernels.hpp"
#include "faultroute/pdmp_sim.hpp"
#include "faultroute/stability.hpp"

using namespace faultroute;

namespace {

const NetworkParams kParams = NetworkParams::make(0.6, 0.4, 1.2, 0.5);
const ModeDistribution kProbs = ModeDistribution::make({0.4, 0.2, 0.3, 0.1});

void BM_DriftGrid(benchmark::State& state, Execution exec) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto axis = kernels::log_uniform_axis(n, 1e-9);
  std::vector<double> out(n * n);
  for (auto _ : state) {
    kernels::drift_grid(exec, kParams, kProbs, axis, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n));
}

void BM_InvariantSet(benchmark::State& state, Execution exec) {
  const CongestionFloor floors = congestion_floors(kParams);
  for (auto _ : state) {
    auto report = invariant_set_check(kParams, floors, static_cast<std::size_t>(state.range(0)), 1, exec);
    benchmark::DoNotOptimize(report.checked);
  }
}

void BM_Probe(benchmark::State& state, Execution exec) {
  SimConfig cfg;
  cfg.horizon = 2000.0;
  ProbeOptions opts;
  opts.replications = static_cast<std::size_t>(state.range(0));
  opts.execution = exec;
  for (auto _ : state) {
    auto r = stability_probe(kParams, RateMatrix::proportional(kProbs), cfg, opts);
    benchmark::DoNotOptimize(r.median_avg_slope);
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_DriftGrid, serial, Execution::kSerial)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_DriftGrid, parallel, Execution::kParallel)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_InvariantSet, serial, Execution::kSerial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_InvariantSet, parallel, Execution::kParallel)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Probe, serial, Execution::kSerial)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Probe, parallel, Execution::kParallel)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
