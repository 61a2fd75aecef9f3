#include "pdl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "pdl/errors.hpp"
#include "text_io.hpp"

namespace pdl {

namespace fs = std::filesystem;

using detail::format_double;
using detail::write_text_atomic;

namespace {

constexpr double kSsimC1 = 0.01 * 0.01;
constexpr double kSsimC2 = 0.03 * 0.03;

double ssim_window(const double* a, const double* b, Index count) {
  const double n = static_cast<double>(count);
  double sum_a = 0.0, sum_b = 0.0, sum_aa = 0.0, sum_bb = 0.0, sum_ab = 0.0;
  for (Index i = 0; i < count; ++i) {
    sum_a += a[i];
    sum_b += b[i];
    sum_aa += a[i] * a[i];
    sum_bb += b[i] * b[i];
    sum_ab += a[i] * b[i];
  }
  const double mu_a = sum_a / n;
  const double mu_b = sum_b / n;
  const double var_a = sum_aa / n - mu_a * mu_a;
  const double var_b = sum_bb / n - mu_b * mu_b;
  const double cov = sum_ab / n - mu_a * mu_b;
  return ((2.0 * mu_a * mu_b + kSsimC1) * (2.0 * cov + kSsimC2)) /
         ((mu_a * mu_a + mu_b * mu_b + kSsimC1) * (var_a + var_b + kSsimC2));
}

}  // namespace

double rmse(const Matrix& X, const Matrix& X_hat) {
  if (X.rows() != X_hat.rows() || X.cols() != X_hat.cols()) {
    std::ostringstream msg;
    msg << "rmse shapes differ: " << X.rows() << "x" << X.cols() << " vs "
        << X_hat.rows() << "x" << X_hat.cols();
    throw DimensionMismatch(msg.str());
  }
  const double mean_sq =
      (X - X_hat).squaredNorm() / static_cast<double>(X.size());
  return std::sqrt(mean_sq);
}

double psnr(double rmse_val, double peak) {
  if (rmse_val == 0.0) {
    throw InfinitePsnr("rmse is zero; PSNR unbounded");
  }
  if (rmse_val < 0.0 || peak <= 0.0) {
    throw Error("psnr requires rmse_val > 0 and peak > 0");
  }
  return 20.0 * std::log10(peak / rmse_val);
}

double ssim(const Matrix& A, const Matrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw DimensionMismatch("ssim shapes differ");
  }
  return ssim_window(A.data(), B.data(), A.size());
}

double ssim_columns_mean(const Matrix& X, const Matrix& X_hat) {
  if (X.rows() != X_hat.rows() || X.cols() != X_hat.cols()) {
    throw DimensionMismatch("ssim shapes differ");
  }
  double sum = 0.0;
  for (Index c = 0; c < X.cols(); ++c) {
    sum += ssim_window(X.col(c).data(), X_hat.col(c).data(), X.rows());
  }
  return sum / static_cast<double>(X.cols());
}

Vector atom_usage(const CoeffMatrix& R, double threshold) {
  const Index n = R.n_atoms();
  const Index m = R.samples();
  Vector usage(n);
  for (Index i = 0; i < n; ++i) {
    Index hits = 0;
    for (Index j = 0; j < m; ++j) {
      if (std::abs(R.values(i, j)) > threshold) {
        ++hits;
      }
    }
    usage[i] = static_cast<double>(hits) / static_cast<double>(m);
  }
  return usage;
}

int active_atom_count(const Vector& usage) {
  int active = 0;
  for (Index i = 0; i < usage.size(); ++i) {
    if (usage[i] > 0.0) {
      ++active;
    }
  }
  return active;
}

DescriptionLength description_length(const CoeffMatrix& R, double fit_error) {
  DescriptionLength dl;
  dl.l_data = R.values.cwiseAbs().sum() + fit_error;
  double row_max_sum = 0.0;
  for (Index i = 0; i < R.values.rows(); ++i) {
    row_max_sum += R.values.row(i).cwiseAbs().maxCoeff();
  }
  dl.l_model = row_max_sum;
  dl.total = dl.l_data + dl.l_model;
  return dl;
}

void write_eval_csv(const fs::path& path, const EvalReport& report) {
  std::ostringstream out;
  out << "rmse,psnr_db,ssim,active_atoms,l_data,l_model,tdl\n";
  out << format_double(report.rmse) << ',' << format_double(report.psnr_db)
      << ',' << format_double(report.ssim) << ',' << report.active_atoms << ','
      << format_double(report.mdl.l_data) << ','
      << format_double(report.mdl.l_model) << ','
      << format_double(report.mdl.total) << "\n";
  write_text_atomic(path, out.str());
}

void write_usage_csv(const fs::path& path, const Vector& usage) {
  std::vector<Index> order(static_cast<std::size_t>(usage.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return usage[a] > usage[b]; });
  std::ostringstream out;
  out << "atom_index,frequency\n";
  for (Index i : order) {
    out << i << ',' << format_double(usage[i]) << "\n";
  }
  write_text_atomic(path, out.str());
}

}  // namespace pdl
