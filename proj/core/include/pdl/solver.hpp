#pragma once

#include <cstdint>
#include <filesystem>

#include "pdl/core_types.hpp"

namespace pdl {

struct SolverConfig {
  int n_atoms = 128;
  HyperParams hp;
  double usage_threshold = 1e-3;
  double tol = 1e-6;  // early stop on relative objective change
  bool reinit_dead_atoms = true;
};

struct ObjectiveTerms {
  double total = 0.0;
  double fit = 0.0;
  double l1 = 0.0;
  double linf = 0.0;
};

struct FitResult {
  Dictionary D;
  CoeffMatrix R;
  TrainTrace trace;
  std::uint64_t seed = 0;
};

/// Largest singular value, by power iteration on the smaller Gram matrix
/// (50 iterations, relative tolerance 1e-9).
double spectral_norm(const Matrix& M);

/// total = ||X - DR||_F^2 + lambda1*sum|R_ij| + lambda2*sum_rows max_j|R_ij|,
/// reported along with the three individual terms.
ObjectiveTerms objective(const DataMatrix& X, const Dictionary& D,
                         const CoeffMatrix& R, const HyperParams& hp);

/// `steps` proximal-gradient steps on the coefficients with the dictionary
/// frozen: gradient step on the fit term (step 1/L, L = 2*spectral_norm(D)^2
/// unless hp.step_coeff overrides), then the composite row prox with
/// (tau1, tau2) = step-scaled (lambda1, lambda2).
CoeffMatrix update_coefficients(const DataMatrix& X, const Dictionary& D,
                                const CoeffMatrix& R, const HyperParams& hp,
                                int steps);

/// `steps` projected-gradient steps on the dictionary with coefficients
/// frozen; each step is followed by the [0, 1] box projection.
/// step_override = 0 means auto (1/L with L = 2*spectral_norm(R)^2).
Dictionary update_dictionary(const DataMatrix& X, const Dictionary& D,
                             const CoeffMatrix& R, int steps,
                             double step_override = 0.0);

/// Alternating minimization: uniform [0,1] dictionary init, Beta(1, beta)
/// coefficient init, then T outer iterations of k_r coefficient steps and
/// k_d dictionary steps. Records one trace row for the initial state and one
/// per outer iteration; stops early once the relative objective change drops
/// below cfg.tol. Deterministic for a fixed seed.
FitResult fit(const DataMatrix& X, const SolverConfig& cfg, std::uint64_t seed);

/// Fixed-dictionary encoding: coefficient steps from a zero initialization
/// until the relative objective change drops below tol or max_steps total
/// steps have run.
CoeffMatrix encode(const DataMatrix& X, const Dictionary& D,
                   const HyperParams& hp, int max_steps, double tol = 1e-6);

/// Trained model as persisted to disk: dictionary, normalization statistics,
/// and the hyperparameters it was trained with.
struct Model {
  Dictionary D;
  Vector mu;
  Vector sigma;
  HyperParams hp;
};

/// Model file: magic "PDLM", u32 LE d, u32 LE n, D as float64 LE
/// column-major, then mu and sigma vectors, then a key=value UTF-8 trailer
/// holding the hyperparameters.
void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

/// CSV with header iter,total,fit,l1,linf,active_atoms.
void write_trace_csv(const std::filesystem::path& path, const TrainTrace& trace);

}  // namespace pdl
