#include <benchmark/benchmark.h>

#include <random>

#include "prodspace/metrics.hpp"
#include "prodspace/product_space.hpp"
#include "support/fixtures.hpp"

using namespace prodspace;

namespace {

metrics::MMatrix random_m(std::size_t nc, std::size_t np, double fill) {
  std::mt19937_64 rng(42);
  return fixtures::random_m(rng, nc, np, fill);
}

void BM_Rca(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto x = fixtures::random_exports(rng, 232, state.range(0), 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::rca(x));
  state.SetItemsProcessed(state.iterations() * 232 * state.range(0));
}
BENCHMARK(BM_Rca)->Arg(500)->Arg(5109)->Unit(benchmark::kMillisecond);

void BM_Proximity(benchmark::State& state) {
  const auto m = random_m(232, state.range(0), 0.10);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::proximity(m));
}
BENCHMARK(BM_Proximity)->Arg(1000)->Arg(5109)->Unit(benchmark::kMillisecond);

void BM_DensityAll(benchmark::State& state) {
  const auto m = random_m(232, state.range(0), 0.10);
  const auto phi = metrics::proximity(m);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::density_all(m, phi));
}
BENCHMARK(BM_DensityAll)->Arg(1000)->Arg(5109)->Unit(benchmark::kMillisecond);

void BM_Sophistication(benchmark::State& state) {
  const auto m = random_m(232, state.range(0), 0.10);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::sophistication(m, 18));
}
BENCHMARK(BM_Sophistication)->Arg(5109)->Unit(benchmark::kMillisecond);

void BM_PercolationSweep(benchmark::State& state) {
  const auto m = random_m(232, state.range(0), 0.10);
  const auto phi = metrics::proximity(m);
  std::vector<double> grid;
  for (int k = 1; k <= 20; ++k) grid.push_back(k / 20.0);
  for (auto _ : state) benchmark::DoNotOptimize(space::percolation_sweep(phi, grid));
}
BENCHMARK(BM_PercolationSweep)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
