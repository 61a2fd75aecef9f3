#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pdl/core_types.hpp"
#include "pdl/hyperparam.hpp"
#include "pdl/ingest.hpp"
#include "pdl/metrics.hpp"
#include "pdl/solver.hpp"

namespace pdl {

/// Input kind for the ingest command.
enum class IngestSource { kCifar10, kCifar100, kPgmDir, kPatchCache };

struct IngestOptions {
  std::filesystem::path input;
  IngestSource source = IngestSource::kCifar100;
  PatchConfig patch;
  std::filesystem::path train_out;
  std::filesystem::path test_out;
};

struct IngestSummary {
  Index total_patches = 0;
  int train_count = 0;
  int test_count = 0;
};

/// Load images (or an existing cache), extract patches, split, and write the
/// train/test caches.
IngestSummary run_ingest(const IngestOptions& opts);

struct TrainOptions {
  std::filesystem::path train_cache;
  std::filesystem::path model_out;
  std::filesystem::path trace_out;
  std::filesystem::path report_out;  // lambda report; .csv and .txt are written
  SolverConfig solver;
  std::optional<double> lambda1;  // overrides the pilot estimate
  std::optional<double> lambda2;
  std::uint64_t seed = 0;
  NormMode norm_mode = NormMode::kPerFeature;
};

struct TrainSummary {
  LambdaReport report;
  ObjectiveTerms final_objective;
  int recorded_iterations = 0;
};

/// Pilot estimation (unless both lambdas are overridden), full fit, and
/// serialization of model, trace, and lambda report.
TrainSummary run_train(const TrainOptions& opts);

struct EncodeOptions {
  std::filesystem::path model_path;
  std::filesystem::path cache;
  std::filesystem::path coeff_out;  // coefficient matrix, patch-cache layout
  int encode_steps = 1000;
  double tol = 1e-6;
};

void run_encode(const EncodeOptions& opts);

struct EvalOptions {
  std::filesystem::path model_path;
  std::filesystem::path test_cache;
  std::filesystem::path eval_out;
  std::filesystem::path usage_out;
  int encode_steps = 1000;
  double tol = 1e-6;
  double usage_threshold = 1e-3;
};

/// Encode the test patches with the stored hyperparameters, reconstruct,
/// denormalize, clamp to [0, 1], and report RMSE/PSNR/SSIM, atom usage, and
/// description length.
EvalReport run_eval(const EvalOptions& opts);

struct AblateOptions {
  std::filesystem::path train_cache;
  std::filesystem::path test_cache;
  std::filesystem::path out_csv;
  SolverConfig solver;
  std::optional<double> lambda1;  // base lambda1; pilot-estimated when absent
  std::uint64_t seed = 0;
  int encode_steps = 1000;
  double usage_threshold = 1e-3;
  NormMode norm_mode = NormMode::kPerFeature;
};

struct AblateRow {
  std::string config;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double rmse = 0.0;
  double psnr_db = 0.0;
  double ssim = 0.0;
  int active_atoms = 0;
};

/// Trains {full, no-Linf, no-L1, neither} with a shared seed and schedule and
/// evaluates each on the test cache.
std::vector<AblateRow> run_ablate(const AblateOptions& opts);

struct SweepOptions {
  std::filesystem::path train_cache;
  std::filesystem::path test_cache;
  std::filesystem::path out_csv;
  SolverConfig solver;
  std::vector<double> grid;
  std::uint64_t seed = 0;
  int encode_steps = 1000;
  double usage_threshold = 1e-3;
  NormMode norm_mode = NormMode::kPerFeature;
};

struct SweepRow {
  std::string variant;  // "full" (lambda2 = 1) or "l1_only" (lambda2 = 0)
  double lambda1 = 0.0;
  int theory = 0;  // 1 on the grid point closest to the pilot estimate
  double rmse = 0.0;
  double psnr_db = 0.0;
  int active_atoms = 0;
  double fit_error = 0.0;
  double l_data = 0.0;
  double l_model = 0.0;
  double tdl = 0.0;
};

/// One training per (grid value, variant) pair with a shared seed; rows come
/// back variant-major in grid order.
std::vector<SweepRow> run_sweep(const SweepOptions& opts);

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);
std::vector<AblateRow> read_ablate_csv(const std::filesystem::path& path);

}  // namespace pdl
