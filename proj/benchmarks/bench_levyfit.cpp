#include <benchmark/benchmark.h>

#include "levyfit/charfn.hpp"
#include "levyfit/fit.hpp"
#include "levyfit/pilot.hpp"
#include "levyfit/sim.hpp"

namespace {

using namespace levyfit;

const ModelSpec kModel = ModelSpec::defaults(ModelKind::brownian_gamma, 20080601);

void BM_KernelTable(benchmark::State& state) {
  const FrequencyGrid half = FrequencyGrid().nonnegative_half();
  for (auto _ : state) {
    KernelTable table(half.nodes(), -10.0, 10.0, static_cast<std::size_t>(state.range(0)));
    benchmark::DoNotOptimize(table.kernel(0, 0));
  }
}
BENCHMARK(BM_KernelTable)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_EmpiricalCfTable(benchmark::State& state) {
  const SampleSet s = sample_increments(kModel, static_cast<std::size_t>(state.range(0)));
  const FrequencyGrid half = FrequencyGrid().nonnegative_half();
  for (auto _ : state) benchmark::DoNotOptimize(empirical_cf_table(s, half.nodes()));
}
BENCHMARK(BM_EmpiricalCfTable)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ObjectiveEvaluation(benchmark::State& state) {
  const SampleSet s = sample_increments(kModel, 1000);
  const FitObjective obj(s, FrequencyGrid(), -10.0, 10.0, 16);
  const GridMeasure nu(1.0, -10.0, 10.0, std::vector<double>(16, 0.05));
  for (auto _ : state) benchmark::DoNotOptimize(obj(1.0, nu));
}
BENCHMARK(BM_ObjectiveEvaluation)->Unit(benchmark::kMicrosecond);

void BM_PilotProjection(benchmark::State& state) {
  const SampleSet s = sample_increments(kModel, 1000);
  for (auto _ : state) benchmark::DoNotOptimize(project_pilot(s, PilotConfig{}));
}
BENCHMARK(BM_PilotProjection)->Unit(benchmark::kMillisecond);

void BM_Minimize(benchmark::State& state) {
  const SampleSet s = sample_increments(kModel, 1000);
  const FitObjective obj(s, FrequencyGrid(), -10.0, 10.0, 16);
  const PilotEstimate pilot = project_pilot(s, PilotConfig{});
  FitConfig cfg;
  cfg.max_iters = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(minimize(obj, pilot.b, pilot.nu, cfg));
}
BENCHMARK(BM_Minimize)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
