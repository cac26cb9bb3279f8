// Serial reference vs OpenMP-parallel trial loops. Both paths produce the
// same draws bit for bit; only wall time differs.
#include "sketchbound/bounds.hpp"
#include "sketchbound/parallel.hpp"
#include "sketchbound/worstcase.hpp"

#include <benchmark/benchmark.h>

namespace sb = sketchbound;

namespace {

sb::Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? sb::Execution::Serial : sb::Execution::Parallel;
}

void label(benchmark::State& state) {
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel x" + std::to_string(sb::thread_limit()));
}

// W draws; args: {mode, n, k=p, sampler (0 direct, 1 bartlett)}
void BM_WBatch(benchmark::State& state) {
  sb::WSampleOptions opts;
  opts.exec = exec_of(state);
  opts.sampler = state.range(3) == 0 ? sb::WSampler::Direct : sb::WSampler::Bartlett;
  const auto n = state.range(1), kp = state.range(2);
  constexpr std::size_t kTrials = 16;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sb::estimate_expected_W(n, kp, kp, kTrials, 1, opts).summary.mean);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kTrials));
  label(state);
}

void BM_SigmaInv(benchmark::State& state) {
  const auto kp = state.range(1);
  constexpr std::size_t kTrials = 100;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sb::estimate_sigma_inv_norm(kp, kp, kTrials, 1, exec_of(state)).mean);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kTrials));
  label(state);
}

void BM_LimitCheck(benchmark::State& state) {
  constexpr std::size_t kTrials = 8;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sb::run_trials(
        kTrials, [](std::size_t i) { return sb::limit_residual_check(400, 20, 20, 1e6, i).direct; },
        exec_of(state)));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kTrials));
  label(state);
}

}  // namespace

BENCHMARK(BM_WBatch)
    ->ArgsProduct({{0, 1}, {4000}, {20}, {0}})
    ->ArgsProduct({{0, 1}, {100000}, {100}, {1}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_SigmaInv)->ArgsProduct({{0, 1}, {100}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_LimitCheck)->ArgsProduct({{0, 1}})->Unit(benchmark::kMillisecond)->UseRealTime();

int main(int argc, char** argv) {
  sb::apply_thread_env();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
