// Serial reference vs OpenMP execution of the two data-parallel kernels.
#include <benchmark/benchmark.h>

#include <vector>

#include "qkdguess/analysis.hpp"
#include "qkdguess/guessing.hpp"

using namespace qkdguess;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::Parallel : Execution::Serial; }

void BM_Scatter(benchmark::State& state) {
  const auto config = standard_sixstate();
  const auto exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(scatter(config, 2000, 1, exec));
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_Scatter)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_Restarts(benchmark::State& state) {
  const BellSpectrum spec({0.7, 0.1, 0.12, 0.08});
  OptimizerOptions o;
  o.execution = mode(state);
  o.seed_known_optimum = false;
  for (auto _ : state) benchmark::DoNotOptimize(maximize_guessing_over_v(spec, standard_sixstate(), o));
  state.SetItemsProcessed(state.iterations() * o.starts);
}
BENCHMARK(BM_Restarts)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_FourStatePEStar(benchmark::State& state) {
  OptimizerOptions o;
  o.execution = mode(state);
  const std::vector<double> eps{0.12};
  const auto config = four_state(1.5707963267948966, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(maximize_guessing(config, eps, o));
}
BENCHMARK(BM_FourStatePEStar)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
