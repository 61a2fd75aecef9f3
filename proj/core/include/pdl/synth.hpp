#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pdl/core_types.hpp"

namespace pdl {

/// Generative-model configuration for synthetic datasets with known ground
/// truth. row_sparsity rows of the coefficient matrix (those with the
/// smallest row-max) are zeroed after sampling, planting inactive atoms for
/// recovery tests; this knob is an extension of the sampled model.
struct SynthConfig {
  int dim = 16;
  int n_atoms = 8;
  int samples = 500;
  double beta = 2.0;         // Beta(1, beta) coefficient prior
  double gamma = 50.0;       // activation sharpness
  double delta = 0.5;        // activation threshold
  double sigma_noise = 0.05;
  std::uint64_t seed = 0;
  int row_sparsity = 0;
};

struct SynthData {
  DataMatrix X;        // raw samples, identity statistics
  Dictionary D_true;
  CoeffMatrix R_true;
  std::vector<std::uint8_t> z;  // activation draws, one per atom
};

/// X = D_true * R_true + noise with D_true ~ U[0,1] per entry, R_true ~
/// Beta(1, beta) per entry, Gaussian noise with std sigma_noise, and
/// z_i ~ Bernoulli(1 / (1 + exp(gamma * (max_j R_ij - delta)))) drawn from
/// the final coefficient rows. Deterministic per seed.
SynthData generate(const SynthConfig& cfg);

/// Writes X as a patch cache plus a ground-truth sidecar at
/// cache_path + ".truth": D_true and R_true in the patch-cache layout
/// back to back, then one byte per atom for z.
void write_synth_dataset(const std::filesystem::path& cache_path,
                         const SynthData& data);

/// Reads the sidecar written by write_synth_dataset.
struct SynthTruth {
  Dictionary D_true;
  CoeffMatrix R_true;
  std::vector<std::uint8_t> z;
};
SynthTruth read_synth_truth(const std::filesystem::path& truth_path);

}  // namespace pdl
