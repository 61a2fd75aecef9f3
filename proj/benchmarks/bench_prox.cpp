#include <benchmark/benchmark.h>

#include "pdl/prox.hpp"
#include "pdl/rng.hpp"

namespace {

pdl::Vector random_row(Eigen::Index size, std::uint64_t seed) {
  pdl::Rng rng(seed);
  pdl::Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    v[i] = rng.uniform(-2.0, 2.0);
  }
  return v;
}

void BM_SoftThreshold(benchmark::State& state) {
  const pdl::Vector v = random_row(state.range(0), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pdl::soft_threshold(v, 0.3));
  }
}
BENCHMARK(BM_SoftThreshold)->Arg(64)->Arg(1024)->Arg(20000);

void BM_ProjectL1Ball(benchmark::State& state) {
  const pdl::Vector v = random_row(state.range(0), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pdl::project_l1_ball(v, 1.0));
  }
}
BENCHMARK(BM_ProjectL1Ball)->Arg(64)->Arg(1024)->Arg(20000);

void BM_ProxL1Linf(benchmark::State& state) {
  const pdl::Vector v = random_row(state.range(0), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pdl::prox_l1_linf(v, {0.05, 0.05}));
  }
}
BENCHMARK(BM_ProxL1Linf)->Arg(64)->Arg(1024)->Arg(20000);

}  // namespace
