#include <benchmark/benchmark.h>

#include "pdl/solver.hpp"
#include "pdl/rng.hpp"

namespace {

pdl::Matrix random_matrix(Eigen::Index rows, Eigen::Index cols,
                          std::uint64_t seed) {
  pdl::Rng rng(seed);
  pdl::Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      m(r, c) = rng.uniform01();
    }
  }
  return m;
}

void BM_SpectralNorm(benchmark::State& state) {
  const pdl::Matrix m = random_matrix(64, state.range(0), 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pdl::spectral_norm(m));
  }
}
BENCHMARK(BM_SpectralNorm)->Arg(128)->Arg(2000);

void BM_CoefficientSteps(benchmark::State& state) {
  const pdl::DataMatrix X(random_matrix(64, state.range(0), 5));
  const pdl::Dictionary D(random_matrix(64, 128, 6));
  const pdl::CoeffMatrix R(pdl::Matrix::Zero(128, state.range(0)));
  pdl::HyperParams hp;
  hp.lambda1 = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pdl::update_coefficients(X, D, R, hp, 1));
  }
}
BENCHMARK(BM_CoefficientSteps)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_DictionarySteps(benchmark::State& state) {
  const pdl::DataMatrix X(random_matrix(64, state.range(0), 7));
  const pdl::Dictionary D(random_matrix(64, 128, 8));
  const pdl::CoeffMatrix R(random_matrix(128, state.range(0), 9));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pdl::update_dictionary(X, D, R, 1));
  }
}
BENCHMARK(BM_DictionarySteps)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_FitSmall(benchmark::State& state) {
  const pdl::DataMatrix X(random_matrix(16, 200, 10));
  pdl::SolverConfig cfg;
  cfg.n_atoms = 8;
  cfg.hp.iterations = 10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pdl::fit(X, cfg, 11));
  }
}
BENCHMARK(BM_FitSmall)->Unit(benchmark::kMillisecond);

}  // namespace
