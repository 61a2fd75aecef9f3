// Acceptance suite: one checkable criterion per function, each printing a
// single PASS/FAIL line. Run with a list of criterion numbers (1..9) or no
// arguments for all. Expensive shared artifacts (caches, ablation and sweep
// tables) are reused across criteria through the work directory; all jobs
// are seeded, so reuse is exact.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "pdl/hyperparam.hpp"
#include "pdl/pipeline.hpp"
#include "pdl/prox.hpp"
#include "pdl/rng.hpp"
#include "pdl/synth.hpp"

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kBaseSeed = 20250810;

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path work_dir() {
  const fs::path dir = fs::current_path() / "acceptance_work";
  fs::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------------------
// Criterion 1: composite prox vs brute-force minimizer, 1000 random rows.

Outcome criterion1() {
  pdl::Rng rng(kBaseSeed + 1);
  double worst_gap = -1e300;
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.below(5));
    const pdl::Vector v = oracle::random_vector(rng, n, 3.0);
    const double tau1 = 2.0 * (1.0 - rng.uniform01());  // (0, 2]
    const double tau2 = 2.0 * (1.0 - rng.uniform01());
    const pdl::Vector x = pdl::prox_l1_linf(v, {tau1, tau2});
    const pdl::Vector ref = oracle::subgradient_minimize(v, tau1, tau2, 100000);
    const double gap = oracle::composite_objective(x, v, tau1, tau2) -
                       oracle::composite_objective(ref, v, tau1, tau2);
    worst_gap = std::max(worst_gap, gap);
    if (gap > 1e-6) ++failures;
  }
  std::ostringstream detail;
  detail << "worst objective gap " << worst_gap << " over 1000 rows, "
         << failures << " above 1e-6";
  return {failures == 0, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 2: monotone descent over 50 random instances.

Outcome criterion2() {
  double worst_increase = 0.0;
  for (int instance = 0; instance < 50; ++instance) {
    const std::uint64_t seed = pdl::derive_seed(kBaseSeed + 2, instance);
    pdl::Rng rng(seed);
    pdl::Matrix raw(16, 200);
    for (Eigen::Index i = 0; i < raw.size(); ++i) {
      raw(i % 16, i / 16) = rng.uniform01();
    }
    pdl::SolverConfig cfg;
    cfg.n_atoms = 8;
    cfg.hp.lambda1 = rng.uniform(0.0, 1.5);
    cfg.hp.lambda2 = rng.uniform(0.0, 1.5);
    const auto result = pdl::fit(pdl::DataMatrix(raw), cfg, seed);
    for (std::size_t i = 1; i < result.trace.rows.size(); ++i) {
      const double prev = result.trace.rows[i - 1].objective_total;
      const double cur = result.trace.rows[i].objective_total;
      const double rel = (cur - prev) / std::max(1.0, std::abs(prev));
      worst_increase = std::max(worst_increase, rel);
    }
  }
  std::ostringstream detail;
  detail << "worst relative objective increase " << worst_increase
         << " (allowed 1e-9)";
  return {worst_increase <= 1e-9, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 3: synthetic recovery with theory-selected lambdas.

pdl::SynthConfig recovery_config(int samples) {
  pdl::SynthConfig cfg;
  cfg.dim = 16;
  cfg.n_atoms = 8;
  cfg.samples = samples;
  cfg.beta = 2.0;
  cfg.sigma_noise = 0.05;
  cfg.row_sparsity = 4;
  cfg.seed = kBaseSeed + 3;
  return cfg;
}

Outcome criterion3() {
  const auto data = pdl::generate(recovery_config(2000));
  pdl::SolverConfig cfg;
  cfg.n_atoms = 8;
  const auto report = pdl::pilot_estimate(data.X, cfg, kBaseSeed + 30);
  cfg.hp.lambda1 = report.lambda1_theoretical;
  cfg.hp.lambda2 = report.lambda2_theoretical;
  const auto result = pdl::fit(data.X, cfg, kBaseSeed + 31);

  const double noise_floor = 16.0 * 2000.0 * 0.05 * 0.05;
  const double final_fit = result.trace.rows.back().term_fit;

  int recovered = 0;
  int planted = 0;
  for (Eigen::Index i = 0; i < data.R_true.n_atoms(); ++i) {
    if (data.R_true.values.row(i).cwiseAbs().maxCoeff() == 0.0) {
      ++planted;
      if (result.R.values.row(i).cwiseAbs().maxCoeff() < 1e-3) {
        ++recovered;
      }
    }
  }
  std::ostringstream detail;
  detail << "lambda1 " << cfg.hp.lambda1 << ", fit " << final_fit << " vs cap "
         << 1.5 * noise_floor << ", planted-inactive recovered " << recovered
         << "/" << planted;
  return {final_fit <= 1.5 * noise_floor && recovered >= 3, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 4: grid search lands near the theoretical lambda1.

Outcome criterion4() {
  const auto data = pdl::generate(recovery_config(2500));
  const pdl::DataMatrix X_train(data.X.values.leftCols(2000));
  const pdl::Matrix X_val = data.X.values.rightCols(500);

  pdl::SolverConfig cfg;
  cfg.n_atoms = 8;
  const auto report = pdl::pilot_estimate(X_train, cfg, kBaseSeed + 40);
  std::vector<double> grid;
  for (int k = 0; k <= 50; ++k) {
    grid.push_back(0.5 + 0.05 * k);
  }
  const auto search =
      pdl::grid_search_lambda1(X_train, X_val, cfg, grid, kBaseSeed + 41);
  pdl::write_grid_table_csv(work_dir() / "lambda_grid.csv", search.table);

  const double theoretical = report.lambda1_theoretical;
  const double rel_err = std::abs(search.best_lambda1 - theoretical) /
                         std::max(theoretical, 1e-12);
  pdl::LambdaReport full_report = report;
  full_report.lambda1_empirical = search.best_lambda1;
  full_report.relative_error_pct = 100.0 * rel_err;
  pdl::write_lambda_report_csv(work_dir() / "lambda_report.csv", full_report);

  std::ostringstream detail;
  detail << "theoretical " << theoretical << ", grid best "
         << search.best_lambda1 << ", relative error "
         << 100.0 * rel_err << "%";
  return {rel_err <= 0.15, detail.str()};
}

// ---------------------------------------------------------------------------
// Shared image-scale dataset for criteria 5-7 and 9: noisy patches sampled
// from a planted set of 16 smooth pixel-range atoms.

void ensure_image_caches(const fs::path& train_cache, const fs::path& test_cache) {
  if (fs::exists(train_cache) && fs::exists(test_cache)) {
    return;
  }
  constexpr int kTrueAtoms = 16;
  constexpr int kTrain = 5000;
  constexpr int kTest = 1000;
  pdl::Rng rng(kBaseSeed + 5);

  // Smooth cosine-profile atoms with pixel-range entries.
  pdl::Matrix atoms(64, kTrueAtoms);
  for (int k = 0; k < kTrueAtoms; ++k) {
    const double fx = static_cast<double>(rng.below(3));
    const double fy = static_cast<double>(rng.below(3));
    const double phase = rng.uniform(0.0, 6.28318530717958647);
    for (int r = 0; r < 8; ++r) {
      for (int c = 0; c < 8; ++c) {
        const double arg = 6.28318530717958647 * (fx * c + fy * r) / 8.0 + phase;
        atoms(r * 8 + c, k) = 0.5 + 0.5 * std::cos(arg);
      }
    }
  }

  pdl::Matrix patches(64, kTrain + kTest);
  for (Eigen::Index j = 0; j < patches.cols(); ++j) {
    pdl::Vector patch = pdl::Vector::Zero(64);
    const int support = 1 + static_cast<int>(rng.below(4));
    for (int s = 0; s < support; ++s) {
      const int k = static_cast<int>(rng.below(kTrueAtoms));
      patch += 0.5 * rng.beta1(2.0) * atoms.col(k);
    }
    for (int i = 0; i < 64; ++i) {
      patch[i] = std::clamp(patch[i] + 0.03 * rng.normal(), 0.0, 1.0);
    }
    patches.col(j) = patch;
  }
  pdl::write_patch_cache(train_cache, patches.leftCols(kTrain));
  pdl::write_patch_cache(test_cache, patches.rightCols(kTest));
}

std::vector<pdl::AblateRow> ensure_ablation(const fs::path& dir) {
  const fs::path csv = dir / "ablate.csv";
  if (fs::exists(csv)) {
    return pdl::read_ablate_csv(csv);
  }
  ensure_image_caches(dir / "train.pdl1", dir / "test.pdl1");
  pdl::AblateOptions opts;
  opts.train_cache = dir / "train.pdl1";
  opts.test_cache = dir / "test.pdl1";
  opts.out_csv = csv;
  opts.solver.n_atoms = 128;
  opts.seed = kBaseSeed + 50;
  opts.encode_steps = 1000;
  return pdl::run_ablate(opts);
}

std::vector<pdl::SweepRow> ensure_sweep(const fs::path& dir) {
  const fs::path csv = dir / "sweep.csv";
  if (fs::exists(csv)) {
    return pdl::read_sweep_csv(csv);
  }
  ensure_image_caches(dir / "train.pdl1", dir / "test.pdl1");
  pdl::SweepOptions opts;
  opts.train_cache = dir / "train.pdl1";
  opts.test_cache = dir / "test.pdl1";
  opts.out_csv = csv;
  opts.solver.n_atoms = 128;
  for (int k = 0; k <= 10; ++k) {
    opts.grid.push_back(0.5 + 0.25 * k);
  }
  opts.seed = kBaseSeed + 60;
  opts.encode_steps = 1000;
  return pdl::run_sweep(opts);
}

const pdl::AblateRow& find_row(const std::vector<pdl::AblateRow>& rows,
                               const std::string& config) {
  for (const auto& row : rows) {
    if (row.config == config) return row;
  }
  throw pdl::Error("missing ablation config: " + config);
}

// Criterion 5: ablation RMSE ordering.
Outcome criterion5() {
  const auto rows = ensure_ablation(work_dir());
  const auto& full = find_row(rows, "full");
  const auto& no_l1 = find_row(rows, "no_l1");
  const auto& no_linf = find_row(rows, "no_linf");
  const auto& none = find_row(rows, "none");
  const bool pass = full.rmse <= no_l1.rmse && full.rmse <= no_linf.rmse &&
                    full.rmse <= none.rmse + 1e-3 &&
                    no_l1.rmse <= none.rmse + 1e-3 &&
                    no_linf.rmse <= none.rmse + 1e-3;
  std::ostringstream detail;
  detail << "rmse full " << full.rmse << ", no_linf " << no_linf.rmse
         << ", no_l1 " << no_l1.rmse << ", none " << none.rmse;
  return {pass, detail.str()};
}

// Criterion 6: full model beats the L1-only model at each variant's own
// grid-best lambda1 by at least 5%.
Outcome criterion6() {
  const auto rows = ensure_sweep(work_dir());
  double best_full = 1e300, best_l1 = 1e300;
  for (const auto& row : rows) {
    if (row.variant == "full") best_full = std::min(best_full, row.rmse);
    if (row.variant == "l1_only") best_l1 = std::min(best_l1, row.rmse);
  }
  std::ostringstream detail;
  detail << "grid-best rmse full " << best_full << " vs l1_only " << best_l1
         << " (need <= 0.95x)";
  return {best_full <= 0.95 * best_l1, detail.str()};
}

// Criterion 7: usage concentration from the criterion-5 artifacts.
Outcome criterion7() {
  const auto rows = ensure_ablation(work_dir());
  const auto& full = find_row(rows, "full");
  const auto& no_linf = find_row(rows, "no_linf");
  std::ostringstream detail;
  detail << "active atoms full " << full.active_atoms << " vs l1-only "
         << no_linf.active_atoms << " (need strict < and full <= 32/128)";
  return {full.active_atoms < no_linf.active_atoms && full.active_atoms <= 32,
          detail.str()};
}

// Criterion 8: Beta MLE recovery at 1e5 samples.
Outcome criterion8() {
  std::ostringstream detail;
  bool pass = true;
  int stream = 0;
  for (double beta0 : {1.5, 2.0, 5.0}) {
    pdl::Rng rng(pdl::derive_seed(kBaseSeed + 8, stream++));
    pdl::Matrix sample(1, 100000);
    for (Eigen::Index i = 0; i < sample.cols(); ++i) {
      sample(0, i) = rng.beta1(beta0);
    }
    const double beta_hat = pdl::fit_beta(pdl::CoeffMatrix(sample));
    const double rel = std::abs(beta_hat - beta0) / beta0;
    detail << "beta " << beta0 << " -> " << beta_hat << " (" << 100.0 * rel
           << "%) ";
    pass = pass && rel <= 0.05;
  }
  return {pass, detail.str()};
}

// Criterion 9: lower total description length at matched-fit sweep points.
Outcome criterion9() {
  const auto rows = ensure_sweep(work_dir());
  std::vector<const pdl::SweepRow*> full, l1;
  for (const auto& row : rows) {
    (row.variant == "full" ? full : l1).push_back(&row);
  }
  if (full.empty() || l1.empty()) {
    return {false, "sweep table is missing a variant"};
  }
  int wins = 0;
  for (const auto* f : full) {
    const pdl::SweepRow* match = l1.front();
    for (const auto* candidate : l1) {
      if (std::abs(candidate->fit_error - f->fit_error) <
          std::abs(match->fit_error - f->fit_error)) {
        match = candidate;
      }
    }
    if (f->tdl < match->tdl) ++wins;
  }
  const double fraction = static_cast<double>(wins) / full.size();
  std::ostringstream detail;
  detail << "full model wins " << wins << "/" << full.size()
         << " matched-fit comparisons (" << 100.0 * fraction
         << "%, need >= 70%)";
  return {fraction >= 0.70, detail.str()};
}

using CriterionFn = Outcome (*)();

struct Criterion {
  int id;
  const char* name;
  CriterionFn fn;
};

const Criterion kCriteria[] = {
    {1, "prox oracle equivalence", criterion1},
    {2, "monotone descent", criterion2},
    {3, "synthetic recovery", criterion3},
    {4, "lambda selection validation", criterion4},
    {5, "ablation ordering", criterion5},
    {6, "improvement over L1-only", criterion6},
    {7, "usage concentration", criterion7},
    {8, "beta MLE recovery", criterion8},
    {9, "MDL consistency", criterion9},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) {
    wanted.push_back(std::atoi(argv[i]));
  }
  int failures = 0;
  for (const auto& criterion : kCriteria) {
    if (!wanted.empty() &&
        std::find(wanted.begin(), wanted.end(), criterion.id) == wanted.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criterion.fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " criterion "
              << criterion.id << ": " << criterion.name << " — "
              << outcome.detail << " [" << secs << "s]" << std::endl;
    if (!outcome.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
