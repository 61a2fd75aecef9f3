#include "pdl/hyperparam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "pdl/ingest.hpp"
#include "pdl/metrics.hpp"
#include "pdl/parallel.hpp"
#include "text_io.hpp"

namespace pdl {

namespace fs = std::filesystem;

using detail::format_double;
using detail::write_text_atomic;

namespace {

constexpr double kBetaClamp = 1.0 - 1e-9;
constexpr int kPilotIterations = 10;
constexpr double kPilotLambda1 = 0.1;

}  // namespace

double fit_beta(const CoeffMatrix& R) {
  const double max_abs = R.values.cwiseAbs().maxCoeff();
  if (max_abs == 0.0) {
    throw DegenerateSample("all coefficients are zero; beta MLE is unbounded");
  }
  const double rescale = max_abs > 1.0 ? 1.0 / max_abs : 1.0;
  double log_sum = 0.0;
  const Index n = R.values.size();
  const double* data = R.values.data();
  for (Index i = 0; i < n; ++i) {
    const double r = std::min(std::abs(data[i]) * rescale, kBetaClamp);
    log_sum -= std::log1p(-r);
  }
  if (log_sum <= 0.0) {
    throw DegenerateSample("all coefficients are zero; beta MLE is unbounded");
  }
  return static_cast<double>(n) / log_sum;
}

double estimate_eta(const Matrix& residual) {
  if (residual.cols() < 1) {
    throw DimensionMismatch("residual must have at least one column");
  }
  return residual.norm() / std::sqrt(static_cast<double>(residual.cols()));
}

LambdaReport select_lambda(double beta_hat, double eta_hat, double delta) {
  LambdaReport report;
  report.beta_hat = beta_hat;
  report.eta_hat = eta_hat;
  report.delta = delta;
  report.lambda1_theoretical = std::max(beta_hat - 1.0, 2.0 * eta_hat + delta);
  report.lambda2_theoretical = 1.0;
  return report;
}

LambdaReport pilot_estimate(const DataMatrix& X, const SolverConfig& cfg,
                            std::uint64_t seed) {
  SolverConfig pilot_cfg = cfg;
  pilot_cfg.hp.lambda1 = kPilotLambda1;
  pilot_cfg.hp.lambda2 = 1.0;
  pilot_cfg.hp.iterations = kPilotIterations;
  const FitResult pilot = fit(X, pilot_cfg, seed);

  const double beta_hat = fit_beta(pilot.R);

  // delta: 95th percentile (nearest rank) of |R|, capped at 1.
  const Index n = pilot.R.values.size();
  std::vector<double> mags(static_cast<std::size_t>(n));
  const double* data = pilot.R.values.data();
  for (Index i = 0; i < n; ++i) {
    mags[static_cast<std::size_t>(i)] = std::abs(data[i]);
  }
  const auto rank = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(n))) - 1;
  std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(rank),
                   mags.end());
  const double delta = std::min(mags[rank], 1.0);

  const Matrix residual = X.values - pilot.D.atoms * pilot.R.values;
  const double eta_hat = estimate_eta(residual);

  return select_lambda(beta_hat, eta_hat, delta);
}

GridSearchResult grid_search_lambda1(const DataMatrix& X_train,
                                     const Matrix& X_val_raw,
                                     const SolverConfig& cfg,
                                     const std::vector<double>& grid,
                                     std::uint64_t seed) {
  if (grid.empty()) {
    throw Error("lambda1 grid must be non-empty");
  }
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw Error("lambda1 grid must be ascending");
  }
  GridSearchResult result;
  result.table.resize(grid.size());
  const int encode_cap = cfg.hp.iterations * cfg.hp.coeff_steps;
  parallel_for(static_cast<int>(grid.size()), [&](int g) {
    SolverConfig point_cfg = cfg;
    point_cfg.hp.lambda1 = grid[static_cast<std::size_t>(g)];
    const FitResult fitted = fit(X_train, point_cfg, seed);
    const DataMatrix X_val =
        normalize_with(X_val_raw, X_train.mu, X_train.sigma);
    const CoeffMatrix R_val =
        encode(X_val, fitted.D, point_cfg.hp, encode_cap, point_cfg.tol);
    const Matrix recon =
        denormalize(fitted.D.atoms * R_val.values, X_train.mu, X_train.sigma);
    result.table[static_cast<std::size_t>(g)] = {
        grid[static_cast<std::size_t>(g)], rmse(X_val_raw, recon)};
  });
  std::size_t best = 0;
  for (std::size_t g = 1; g < result.table.size(); ++g) {
    if (result.table[g].rmse < result.table[best].rmse) {
      best = g;  // ties stay at the smaller lambda1
    }
  }
  result.best_lambda1 = result.table[best].lambda1;
  return result;
}

void write_lambda_report_csv(const fs::path& path, const LambdaReport& report) {
  std::ostringstream out;
  out << "beta_hat,eta_hat,delta,lambda1_theoretical,lambda2_theoretical,"
         "lambda1_empirical,relative_error_pct\n";
  out << format_double(report.beta_hat) << ',' << format_double(report.eta_hat)
      << ',' << format_double(report.delta) << ','
      << format_double(report.lambda1_theoretical) << ','
      << format_double(report.lambda2_theoretical) << ',';
  if (report.lambda1_empirical) {
    out << format_double(*report.lambda1_empirical);
  }
  out << ',';
  if (report.relative_error_pct) {
    out << format_double(*report.relative_error_pct);
  }
  out << "\n";
  write_text_atomic(path, out.str());
}

void write_lambda_report_text(const fs::path& path, const LambdaReport& report) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(6);
  out << "beta_hat              " << report.beta_hat << "\n"
      << "eta_hat               " << report.eta_hat << "\n"
      << "delta                 " << report.delta << "\n"
      << "lambda1 (theoretical) " << report.lambda1_theoretical << "\n"
      << "lambda2 (theoretical) " << report.lambda2_theoretical << "\n";
  if (report.lambda1_empirical) {
    out << "lambda1 (empirical)   " << *report.lambda1_empirical << "\n";
  }
  if (report.relative_error_pct) {
    out << "relative error %      " << *report.relative_error_pct << "\n";
  }
  write_text_atomic(path, out.str());
}

void write_grid_table_csv(const fs::path& path,
                          const std::vector<GridPoint>& table) {
  std::ostringstream out;
  out << "lambda1,rmse\n";
  for (const GridPoint& point : table) {
    out << format_double(point.lambda1) << ',' << format_double(point.rmse)
        << "\n";
  }
  write_text_atomic(path, out.str());
}

}  // namespace pdl
