#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "pdl/core_types.hpp"
#include "pdl/solver.hpp"

namespace pdl {

/// Outcome of the theory-driven selection rule, optionally paired with the
/// empirical optimum from a grid search.
struct LambdaReport {
  double beta_hat = 0.0;
  double eta_hat = 0.0;
  double delta = 0.0;
  double lambda1_theoretical = 0.0;
  double lambda2_theoretical = 1.0;
  std::optional<double> lambda1_empirical;
  std::optional<double> relative_error_pct;
};

/// MLE of the shape of a Beta(1, beta) sample: beta_hat = N / sum(-log(1-r))
/// over all N entries of |R|. Entries are rescaled by max|R| when any entry
/// exceeds 1, then clamped into [0, 1 - 1e-9]. Throws DegenerateSample when
/// every entry is zero.
double fit_beta(const CoeffMatrix& R);

/// Correlation bound estimate ||E||_F / sqrt(m) for a d x m residual.
double estimate_eta(const Matrix& residual);

/// lambda1 = max(beta_hat - 1, 2*eta_hat + delta), lambda2 = 1.
LambdaReport select_lambda(double beta_hat, double eta_hat, double delta);

/// Short pilot fit (10 outer iterations, lambda1 = 0.1, lambda2 = 1) used to
/// estimate beta, eta, and delta on the training data, feeding select_lambda.
/// delta is the 95th percentile (nearest rank) of |R|, capped at 1.
LambdaReport pilot_estimate(const DataMatrix& X, const SolverConfig& cfg,
                            std::uint64_t seed);

struct GridPoint {
  double lambda1 = 0.0;
  double rmse = 0.0;
};

struct GridSearchResult {
  double best_lambda1 = 0.0;
  std::vector<GridPoint> table;
};

/// Trains one model per grid value (all with the same seed), scores each by
/// denormalized RMSE on the raw validation samples, and returns the argmin
/// with ties broken toward smaller lambda1. X_train carries the statistics
/// used to normalize the validation data.
GridSearchResult grid_search_lambda1(const DataMatrix& X_train,
                                     const Matrix& X_val_raw,
                                     const SolverConfig& cfg,
                                     const std::vector<double>& grid,
                                     std::uint64_t seed);

void write_lambda_report_csv(const std::filesystem::path& path,
                             const LambdaReport& report);
void write_lambda_report_text(const std::filesystem::path& path,
                              const LambdaReport& report);
void write_grid_table_csv(const std::filesystem::path& path,
                          const std::vector<GridPoint>& table);

}  // namespace pdl
