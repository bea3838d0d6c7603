#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "gnsforge/grid.hpp"
#include "gnsforge/kernels.hpp"

using namespace gnsforge;

namespace {

std::vector<Real> random_values(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> d(0.5, 1.5);
  std::vector<Real> v(n);
  for (Real& x : v) x = d(gen);
  return v;
}

template <auto Kernel>
void bm_apply_stencil(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const GridPtr grid = make_grid(Domain::half_line, N, 1);
  const auto in = random_values(N, 1);
  std::vector<Real> out(N);
  const auto st = grid->second_derivative(Parity::even);
  for (auto _ : state) {
    Kernel(in, st, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(N));
}

template <auto Kernel>
void bm_dot(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto a = random_values(N, 2), b = random_values(N, 3);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(N));
}

template <auto Kernel>
void bm_staggered_energy(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto w = random_values(N, 4), c = random_values(N - 1, 5);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(w, c));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(N));
}

}  // namespace

#define GNS_BENCH(fixture, kernel)                                     \
  BENCHMARK(fixture<&kernels::serial::kernel>)                         \
      ->Name(#kernel "/serial")                                        \
      ->RangeMultiplier(4)                                             \
      ->Range(1 << 10, 1 << 18);                                       \
  BENCHMARK(fixture<&kernels::parallel::kernel>)                       \
      ->Name(#kernel "/parallel")                                      \
      ->RangeMultiplier(4)                                             \
      ->Range(1 << 10, 1 << 18)

GNS_BENCH(bm_apply_stencil, apply_stencil);
GNS_BENCH(bm_dot, dot);
GNS_BENCH(bm_staggered_energy, staggered_energy);

BENCHMARK_MAIN();
