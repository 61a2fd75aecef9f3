#include "pdl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "binary_io.hpp"
#include "pdl/ingest.hpp"
#include "pdl/rng.hpp"

namespace pdl {

namespace fs = std::filesystem;

SynthData generate(const SynthConfig& cfg) {
  if (cfg.dim < 1 || cfg.n_atoms < 1 || cfg.samples < 1) {
    throw DimensionMismatch("synth dimensions must be positive");
  }
  if (cfg.row_sparsity < 0 || cfg.row_sparsity > cfg.n_atoms) {
    throw DimensionMismatch("row_sparsity must lie in [0, n_atoms]");
  }
  Rng rng(cfg.seed);
  const Index d = cfg.dim;
  const Index n = cfg.n_atoms;
  const Index m = cfg.samples;

  Matrix atoms(d, n);
  for (Index c = 0; c < n; ++c) {
    for (Index r = 0; r < d; ++r) {
      atoms(r, c) = rng.uniform01();
    }
  }
  Matrix coeffs(n, m);
  for (Index c = 0; c < m; ++c) {
    for (Index r = 0; r < n; ++r) {
      coeffs(r, c) = rng.beta1(cfg.beta);
    }
  }

  if (cfg.row_sparsity > 0) {
    // Plant inactive atoms: zero the rows with the smallest row-max,
    // ties resolved by row index.
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return coeffs.row(a).maxCoeff() < coeffs.row(b).maxCoeff();
    });
    for (int k = 0; k < cfg.row_sparsity; ++k) {
      coeffs.row(order[static_cast<std::size_t>(k)]).setZero();
    }
  }

  Matrix noise(d, m);
  for (Index c = 0; c < m; ++c) {
    for (Index r = 0; r < d; ++r) {
      noise(r, c) = cfg.sigma_noise * rng.normal();
    }
  }

  SynthData data;
  data.z.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double row_max = coeffs.row(i).maxCoeff();
    const double p = 1.0 / (1.0 + std::exp(cfg.gamma * (row_max - cfg.delta)));
    data.z[static_cast<std::size_t>(i)] = rng.uniform01() < p ? 1 : 0;
  }

  data.X = DataMatrix(atoms * coeffs + noise);
  data.D_true = Dictionary(std::move(atoms));
  data.R_true = CoeffMatrix(std::move(coeffs));
  return data;
}

void write_synth_dataset(const fs::path& cache_path, const SynthData& data) {
  write_patch_cache(cache_path, data.X.values);
  const fs::path truth_path = cache_path.string() + ".truth";
  const fs::path tmp = truth_path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open " + tmp.string() + " for writing");
    }
    auto write_block = [&out](const Matrix& m) {
      out.write("PDL1", 4);
      detail::write_u32le(out, static_cast<std::uint32_t>(m.rows()));
      detail::write_u32le(out, static_cast<std::uint32_t>(m.cols()));
      detail::write_matrix_values(out, m);
    };
    write_block(data.D_true.atoms);
    write_block(data.R_true.values);
    out.write(reinterpret_cast<const char*>(data.z.data()),
              static_cast<std::streamsize>(data.z.size()));
    if (!out) {
      throw IoError("write failed on " + tmp.string());
    }
  }
  fs::rename(tmp, truth_path);
}

SynthTruth read_synth_truth(const fs::path& truth_path) {
  std::ifstream in(truth_path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + truth_path.string());
  }
  auto read_block = [&in, &truth_path]() {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string_view(magic, 4) != "PDL1") {
      throw FormatError(truth_path.string() + ": bad sidecar block magic");
    }
    const std::uint32_t rows = detail::read_u32le(in);
    const std::uint32_t cols = detail::read_u32le(in);
    return detail::read_matrix_values(in, rows, cols);
  };
  SynthTruth truth;
  truth.D_true = Dictionary(read_block());
  truth.R_true = CoeffMatrix(read_block());
  truth.z.resize(static_cast<std::size_t>(truth.R_true.n_atoms()));
  in.read(reinterpret_cast<char*>(truth.z.data()),
          static_cast<std::streamsize>(truth.z.size()));
  if (!in) {
    throw TruncatedFile(truth_path.string() + ": sidecar z block truncated");
  }
  return truth;
}

}  // namespace pdl
