#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "pdl/errors.hpp"

namespace pdl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// d x m sample matrix, one column per sample, together with the per-feature
/// statistics attached by normalization. Raw data carries mu = 0, sigma = 1.
struct DataMatrix {
  Matrix values;
  Vector mu;
  Vector sigma;

  DataMatrix() = default;

  // Wraps a raw matrix with identity statistics. Validates shape/finiteness.
  explicit DataMatrix(Matrix v);

  DataMatrix(Matrix v, Vector mu_in, Vector sigma_in);

  Index dim() const { return values.rows(); }
  Index samples() const { return values.cols(); }
};

/// d x n dictionary, one atom per column. The solver keeps entries in [0, 1].
struct Dictionary {
  Matrix atoms;

  Dictionary() = default;
  explicit Dictionary(Matrix a) : atoms(std::move(a)) {}

  Index dim() const { return atoms.rows(); }
  Index n_atoms() const { return atoms.cols(); }
};

/// n x m coefficient matrix; row i holds the coefficients of atom i across
/// all m samples.
struct CoeffMatrix {
  Matrix values;

  CoeffMatrix() = default;
  explicit CoeffMatrix(Matrix v) : values(std::move(v)) {}

  Index n_atoms() const { return values.rows(); }
  Index samples() const { return values.cols(); }
};

/// Regularization weights, prior parameters, and the solver schedule.
/// step_coeff / step_dict equal to 0 mean "auto": 1/L with L recomputed from
/// the current iterate's spectral norm.
struct HyperParams {
  double lambda1 = 1.0;
  double lambda2 = 1.0;  // the selection rule fixes this to 1
  double beta = 2.0;     // Beta(1, beta) prior shape, > 1
  double delta = 0.95;   // activation threshold in [0, 1]
  double gamma = 50.0;   // activation sharpness; used by the sampler only
  double sigma_noise = 0.05;
  double eta = 0.0;  // residual/atom correlation bound
  int iterations = 100;  // outer iterations (T)
  int coeff_steps = 10;  // inner coefficient steps per outer iteration (k_r)
  int dict_steps = 10;   // inner dictionary steps per outer iteration (k_d)
  double step_coeff = 0.0;
  double step_dict = 0.0;
};

/// One recorded outer iteration: the objective split into its three terms
/// plus the count of rows still in use.
struct TraceRow {
  int iter = 0;
  double objective_total = 0.0;
  double term_fit = 0.0;
  double term_l1 = 0.0;
  double term_linf = 0.0;
  int active_atom_count = 0;
};

struct TrainTrace {
  std::vector<TraceRow> rows;
};

/// Throws DimensionMismatch unless X is d x m, D is d x n, R is n x m with
/// consistent d, n, m >= 1. The message names the offending pair.
void check_dims(const DataMatrix& X, const Dictionary& D, const CoeffMatrix& R);

}  // namespace pdl
