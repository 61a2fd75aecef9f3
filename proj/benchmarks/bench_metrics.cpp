#include <benchmark/benchmark.h>

#include "pdl/metrics.hpp"
#include "pdl/rng.hpp"

namespace {

pdl::Matrix random_patches(Eigen::Index cols, std::uint64_t seed) {
  pdl::Rng rng(seed);
  pdl::Matrix m(64, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < 64; ++r) {
      m(r, c) = rng.uniform01();
    }
  }
  return m;
}

void BM_Rmse(benchmark::State& state) {
  const pdl::Matrix a = random_patches(state.range(0), 12);
  const pdl::Matrix b = random_patches(state.range(0), 13);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pdl::rmse(a, b));
  }
}
BENCHMARK(BM_Rmse)->Arg(2000)->Arg(20000);

void BM_SsimColumns(benchmark::State& state) {
  const pdl::Matrix a = random_patches(state.range(0), 14);
  const pdl::Matrix b = random_patches(state.range(0), 15);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pdl::ssim_columns_mean(a, b));
  }
}
BENCHMARK(BM_SsimColumns)->Arg(2000)->Arg(20000);

void BM_AtomUsage(benchmark::State& state) {
  pdl::Rng rng(16);
  pdl::Matrix r(128, state.range(0));
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    r(i % 128, i / 128) = rng.uniform01() < 0.2 ? rng.uniform01() : 0.0;
  }
  const pdl::CoeffMatrix coeffs(r);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pdl::atom_usage(coeffs, 1e-3));
  }
}
BENCHMARK(BM_AtomUsage)->Arg(2000)->Arg(20000);

}  // namespace

BENCHMARK_MAIN();
