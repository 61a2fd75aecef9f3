#pragma once

#include <filesystem>

#include "pdl/core_types.hpp"

namespace pdl {

/// sqrt of the mean squared entrywise error.
double rmse(const Matrix& X, const Matrix& X_hat);

/// 20 * log10(peak / rmse_val). Throws InfinitePsnr when rmse_val is 0.
double psnr(double rmse_val, double peak = 1.0);

/// Single-window SSIM over two same-shaped arrays (population moments,
/// C1 = 0.01^2, C2 = 0.03^2, peak 1).
double ssim(const Matrix& A, const Matrix& B);

/// Mean single-window SSIM over column pairs; each column is one patch.
double ssim_columns_mean(const Matrix& X, const Matrix& X_hat);

/// usage[i] = fraction of samples with |R_ij| > threshold.
Vector atom_usage(const CoeffMatrix& R, double threshold);

/// Number of usage entries strictly above zero.
int active_atom_count(const Vector& usage);

struct DescriptionLength {
  double l_data = 0.0;   // sum|R_ij| + fit_error
  double l_model = 0.0;  // sum over rows of max_j |R_ij|
  double total = 0.0;
};

DescriptionLength description_length(const CoeffMatrix& R, double fit_error);

struct EvalReport {
  double rmse = 0.0;
  double psnr_db = 0.0;
  double ssim = 0.0;
  int active_atoms = 0;
  Vector usage_freq;
  DescriptionLength mdl;
};

void write_eval_csv(const std::filesystem::path& path, const EvalReport& report);

/// (atom_index, frequency) rows sorted by descending frequency.
void write_usage_csv(const std::filesystem::path& path, const Vector& usage);

}  // namespace pdl
