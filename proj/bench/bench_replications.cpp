#include <benchmark/benchmark.h>

#include <omp.h>

#include "vcount/evaluation.hpp"

using namespace vcount;

namespace {

Execution policy_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void BM_Replications(benchmark::State& state) {
  ScenarioConfig s = default_scenario();
  s.sampling.lmp = 0.3;
  s.sampling.replications = 200;
  s.detector = DetectorLocation::middle;
  const auto data = prepare(s);
  for (auto _ : state) benchmark::DoNotOptimize(run_replications(data, s, policy_of(state)));
  state.SetItemsProcessed(state.iterations() * s.sampling.replications);
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}

void BM_Sweep(benchmark::State& state) {
  SweepSpec spec;
  spec.base = default_scenario();
  spec.base.sampling.replications = 20;
  spec.axes = {{SweepAxis::lmp, {"0.1", "0.3", "0.5", "0.7", "0.9"}},
               {SweepAxis::vc_ratio, {"0.2", "0.6", "1.0"}}};
  for (auto _ : state) benchmark::DoNotOptimize(sweep(spec, policy_of(state)));
  state.SetItemsProcessed(state.iterations() * 15 * 20);
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}

void BM_Simulate(benchmark::State& state) {
  const ScenarioConfig s = default_scenario();
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate(s.geometry, s.signal, s.resolved_demand()));
}

}  // namespace

BENCHMARK(BM_Replications)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Simulate)->Unit(benchmark::kMicrosecond);

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::AddCustomContext("omp_max_threads", std::to_string(omp_get_max_threads()));
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
