#include <vector>

#include <benchmark/benchmark.h>

#include "renewal_ld/distribution.hpp"
#include "renewal_ld/mc_engine.hpp"
#include "renewal_ld/occupation.hpp"
#include "renewal_ld/rng.hpp"

using namespace renewal_ld;

namespace {

const WaitingDistribution& law(int which) {
  static const WaitingDistribution laws[] = {WaitingDistribution::pareto(3.0),
                                             WaitingDistribution::inverse_rayleigh(1.0),
                                             WaitingDistribution::lognormal(0.0, 1.5)};
  return laws[which];
}

void BM_UniformStream(benchmark::State& state) {
  UniformStream s(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(s.next());
}
BENCHMARK(BM_UniformStream);

void BM_Sample(benchmark::State& state) {
  const auto& d = law(static_cast<int>(state.range(0)));
  UniformStream s(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(d.sample(s.next()));
  state.SetLabel(d.describe());
}
BENCHMARK(BM_Sample)->DenseRange(0, 2);

void BM_SimulateCounts(benchmark::State& state) {
  const SimulationConfig cfg{law(0), TimeGrid::logarithmic(1.0, 100.0, 21),
                             static_cast<std::uint64_t>(state.range(0)), 1, 10000};
  for (auto _ : state) benchmark::DoNotOptimize(simulate_counts(cfg, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateCounts)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ConvolveStep(benchmark::State& state) {
  const auto& d = law(0);
  const auto grid = TimeGrid::per_decade(1e-3, 1e3, static_cast<std::size_t>(state.range(0)));
  const auto table = occupation_table(d, grid, 1);
  const auto row = table.row(1);
  ConvolutionOptions opts;
  opts.tol = {1e-30, 1e-10, 30};
  for (auto _ : state) benchmark::DoNotOptimize(convolve_step(row, d, grid, opts));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(BM_ConvolveStep)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
