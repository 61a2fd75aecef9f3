#include "pdl/solver.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "binary_io.hpp"
#include "pdl/prox.hpp"
#include "pdl/rng.hpp"
#include "text_io.hpp"

namespace pdl {

namespace fs = std::filesystem;

namespace {

constexpr int kPowerIterations = 50;
constexpr double kPowerTol = 1e-9;
constexpr double kLipschitzFloor = 1e-30;
constexpr int kDeadAtomPatience = 5;

// 1/L step from the spectral norm, with a hair of inflation so the descent
// guarantee survives the power-iteration tolerance.
double auto_step(double sigma_max) {
  const double lipschitz = std::max(2.0 * sigma_max * sigma_max, kLipschitzFloor);
  return 1.0 / (lipschitz * (1.0 + 1e-9));
}

void apply_row_prox(Matrix& R, double tau1, double tau2) {
  Vector row(R.cols());
  for (Index i = 0; i < R.rows(); ++i) {
    row = R.row(i).transpose();
    R.row(i) = prox_l1_linf(row, ProxParams{tau1, tau2}).transpose();
  }
}

int count_active_rows(const Matrix& R, double threshold) {
  int active = 0;
  for (Index i = 0; i < R.rows(); ++i) {
    if (R.row(i).cwiseAbs().maxCoeff() > threshold) {
      ++active;
    }
  }
  return active;
}

}  // namespace

using detail::format_double;

double spectral_norm(const Matrix& M) {
  // Power-iterate the smaller of M M^T and M^T M.
  const Matrix gram = M.rows() <= M.cols()
                          ? Matrix(M * M.transpose())
                          : Matrix(M.transpose() * M);
  const Index n = gram.rows();
  if (gram.cwiseAbs().maxCoeff() == 0.0) {
    return 0.0;
  }
  // Deterministic start with a mild ramp so it is never orthogonal to the
  // leading eigenvector of a structured matrix.
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    v[i] = 1.0 + 1e-3 * static_cast<double>(i);
  }
  v.normalize();
  double eig = 0.0;
  for (int it = 0; it < kPowerIterations; ++it) {
    Vector w = gram * v;
    const double norm = w.norm();
    if (norm == 0.0) {
      return 0.0;
    }
    v = w / norm;
    if (it > 0 && std::abs(norm - eig) <= kPowerTol * norm) {
      eig = norm;
      break;
    }
    eig = norm;
  }
  return std::sqrt(eig);
}

ObjectiveTerms objective(const DataMatrix& X, const Dictionary& D,
                         const CoeffMatrix& R, const HyperParams& hp) {
  check_dims(X, D, R);
  ObjectiveTerms terms;
  terms.fit = (X.values - D.atoms * R.values).squaredNorm();
  terms.l1 = hp.lambda1 * R.values.cwiseAbs().sum();
  double row_max_sum = 0.0;
  for (Index i = 0; i < R.values.rows(); ++i) {
    row_max_sum += R.values.row(i).cwiseAbs().maxCoeff();
  }
  terms.linf = hp.lambda2 * row_max_sum;
  terms.total = terms.fit + terms.l1 + terms.linf;
  return terms;
}

CoeffMatrix update_coefficients(const DataMatrix& X, const Dictionary& D,
                                const CoeffMatrix& R, const HyperParams& hp,
                                int steps) {
  check_dims(X, D, R);
  const double step =
      hp.step_coeff > 0.0 ? hp.step_coeff : auto_step(spectral_norm(D.atoms));
  const Matrix gram = D.atoms.transpose() * D.atoms;
  const Matrix dtx = D.atoms.transpose() * X.values;
  Matrix coeffs = R.values;
  const double tau1 = hp.lambda1 * step;
  const double tau2 = hp.lambda2 * step;
  for (int s = 0; s < steps; ++s) {
    coeffs -= 2.0 * step * (gram * coeffs - dtx);
    apply_row_prox(coeffs, tau1, tau2);
  }
  return CoeffMatrix(std::move(coeffs));
}

Dictionary update_dictionary(const DataMatrix& X, const Dictionary& D,
                             const CoeffMatrix& R, int steps,
                             double step_override) {
  check_dims(X, D, R);
  const double step = step_override > 0.0
                          ? step_override
                          : auto_step(spectral_norm(R.values));
  const Matrix gram = R.values * R.values.transpose();
  const Matrix xrt = X.values * R.values.transpose();
  Matrix atoms = D.atoms;
  for (int s = 0; s < steps; ++s) {
    atoms -= 2.0 * step * (atoms * gram - xrt);
    project_box_inplace(atoms, 0.0, 1.0);
  }
  return Dictionary(std::move(atoms));
}

FitResult fit(const DataMatrix& X, const SolverConfig& cfg, std::uint64_t seed) {
  const Index d = X.dim();
  const Index m = X.samples();
  const Index n = cfg.n_atoms;
  if (n < 1) {
    throw DimensionMismatch("n_atoms must be >= 1");
  }
  if (m < n) {
    std::cerr << "warning: fewer samples (" << m << ") than atoms (" << n
              << ")\n";
  }
  Rng rng(seed);
  Matrix atoms(d, n);
  for (Index c = 0; c < n; ++c) {
    for (Index r = 0; r < d; ++r) {
      atoms(r, c) = rng.uniform01();
    }
  }
  Matrix coeffs(n, m);
  for (Index c = 0; c < m; ++c) {
    for (Index r = 0; r < n; ++r) {
      coeffs(r, c) = rng.beta1(cfg.hp.beta);
    }
  }

  FitResult result;
  result.seed = seed;
  result.D = Dictionary(std::move(atoms));
  result.R = CoeffMatrix(std::move(coeffs));

  auto record = [&](int iter) {
    const ObjectiveTerms terms = objective(X, result.D, result.R, cfg.hp);
    TraceRow row;
    row.iter = iter;
    row.objective_total = terms.total;
    row.term_fit = terms.fit;
    row.term_l1 = terms.l1;
    row.term_linf = terms.linf;
    row.active_atom_count = count_active_rows(result.R.values, cfg.usage_threshold);
    result.trace.rows.push_back(row);
    if (!std::isfinite(terms.total)) {
      throw NonFiniteObjective("objective diverged at iteration " +
                               std::to_string(iter));
    }
    return terms.total;
  };

  double previous_total = record(0);
  std::vector<int> zero_streak(static_cast<std::size_t>(n), 0);

  for (int t = 1; t <= cfg.hp.iterations; ++t) {
    result.R = update_coefficients(X, result.D, result.R, cfg.hp, cfg.hp.coeff_steps);
    result.D = update_dictionary(X, result.D, result.R, cfg.hp.dict_steps,
                                 cfg.hp.step_dict);

    if (cfg.reinit_dead_atoms) {
      // A row that stays identically zero for kDeadAtomPatience consecutive
      // outer iterations gets its atom redrawn. The row itself is zero, so
      // the redraw leaves the objective untouched.
      for (Index i = 0; i < n; ++i) {
        const bool dead = result.R.values.row(i).cwiseAbs().maxCoeff() == 0.0;
        auto& streak = zero_streak[static_cast<std::size_t>(i)];
        streak = dead ? streak + 1 : 0;
        if (streak >= kDeadAtomPatience) {
          for (Index r = 0; r < d; ++r) {
            result.D.atoms(r, i) = rng.uniform01();
          }
          streak = 0;
        }
      }
    }

    const double total = record(t);
    if (std::abs(previous_total - total) <=
        cfg.tol * std::max(1.0, std::abs(previous_total))) {
      break;
    }
    previous_total = total;
  }
  return result;
}

CoeffMatrix encode(const DataMatrix& X, const Dictionary& D,
                   const HyperParams& hp, int max_steps, double tol) {
  CoeffMatrix R(Matrix::Zero(D.n_atoms(), X.samples()));
  check_dims(X, D, R);
  const double step =
      hp.step_coeff > 0.0 ? hp.step_coeff : auto_step(spectral_norm(D.atoms));
  const Matrix gram = D.atoms.transpose() * D.atoms;
  const Matrix dtx = D.atoms.transpose() * X.values;
  const double tau1 = hp.lambda1 * step;
  const double tau2 = hp.lambda2 * step;
  double previous_total = objective(X, D, R, hp).total;
  for (int s = 0; s < max_steps; ++s) {
    R.values -= 2.0 * step * (gram * R.values - dtx);
    apply_row_prox(R.values, tau1, tau2);
    const double total = objective(X, D, R, hp).total;
    if (!std::isfinite(total)) {
      throw NonFiniteObjective("encode objective diverged at step " +
                               std::to_string(s));
    }
    if (std::abs(previous_total - total) <=
        tol * std::max(1.0, std::abs(previous_total))) {
      break;
    }
    previous_total = total;
  }
  return R;
}

void save_model(const fs::path& path, const Model& model) {
  const Index d = model.D.dim();
  const Index n = model.D.n_atoms();
  if (d < 1 || n < 1) {
    throw DimensionMismatch("refusing to save an empty model");
  }
  if (model.mu.size() != d || model.sigma.size() != d) {
    throw DimensionMismatch("model statistics do not match dictionary rows");
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open " + tmp.string() + " for writing");
    }
    out.write("PDLM", 4);
    detail::write_u32le(out, static_cast<std::uint32_t>(d));
    detail::write_u32le(out, static_cast<std::uint32_t>(n));
    detail::write_matrix_values(out, model.D.atoms);
    for (Index i = 0; i < d; ++i) detail::write_f64le(out, model.mu[i]);
    for (Index i = 0; i < d; ++i) detail::write_f64le(out, model.sigma[i]);
    const HyperParams& hp = model.hp;
    out << "lambda1=" << format_double(hp.lambda1) << "\n"
        << "lambda2=" << format_double(hp.lambda2) << "\n"
        << "beta=" << format_double(hp.beta) << "\n"
        << "delta=" << format_double(hp.delta) << "\n"
        << "gamma=" << format_double(hp.gamma) << "\n"
        << "sigma_noise=" << format_double(hp.sigma_noise) << "\n"
        << "eta=" << format_double(hp.eta) << "\n"
        << "T=" << hp.iterations << "\n"
        << "k_r=" << hp.coeff_steps << "\n"
        << "k_d=" << hp.dict_steps << "\n"
        << "step_r=" << format_double(hp.step_coeff) << "\n"
        << "step_d=" << format_double(hp.step_dict) << "\n";
    if (!out) {
      throw IoError("write failed on " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

Model load_model(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string_view(magic, 4) != "PDLM") {
    throw FormatError(path.string() + ": bad model magic");
  }
  const std::uint32_t d = detail::read_u32le(in);
  const std::uint32_t n = detail::read_u32le(in);
  if (d < 1 || n < 1) {
    throw FormatError(path.string() + ": empty model");
  }
  Model model;
  model.D = Dictionary(detail::read_matrix_values(in, d, n));
  model.mu = Vector(d);
  model.sigma = Vector(d);
  for (std::uint32_t i = 0; i < d; ++i) model.mu[i] = detail::read_f64le(in);
  for (std::uint32_t i = 0; i < d; ++i) model.sigma[i] = detail::read_f64le(in);

  std::string line;
  std::istringstream parse;
  parse.imbue(std::locale::classic());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError(path.string() + ": malformed trailer line: " + line);
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    parse.clear();
    parse.str(value);
    HyperParams& hp = model.hp;
    if (key == "lambda1") parse >> hp.lambda1;
    else if (key == "lambda2") parse >> hp.lambda2;
    else if (key == "beta") parse >> hp.beta;
    else if (key == "delta") parse >> hp.delta;
    else if (key == "gamma") parse >> hp.gamma;
    else if (key == "sigma_noise") parse >> hp.sigma_noise;
    else if (key == "eta") parse >> hp.eta;
    else if (key == "T") parse >> hp.iterations;
    else if (key == "k_r") parse >> hp.coeff_steps;
    else if (key == "k_d") parse >> hp.dict_steps;
    else if (key == "step_r") parse >> hp.step_coeff;
    else if (key == "step_d") parse >> hp.step_dict;
    else throw FormatError(path.string() + ": unknown trailer key: " + key);
    if (parse.fail()) {
      throw FormatError(path.string() + ": bad value for " + key);
    }
  }
  return model;
}

void write_trace_csv(const fs::path& path, const TrainTrace& trace) {
  std::ostringstream out;
  out << "iter,total,fit,l1,linf,active_atoms\n";
  for (const TraceRow& row : trace.rows) {
    out << row.iter << ',' << format_double(row.objective_total) << ','
        << format_double(row.term_fit) << ',' << format_double(row.term_l1)
        << ',' << format_double(row.term_linf) << ',' << row.active_atom_count
        << "\n";
  }
  detail::write_text_atomic(path, out.str());
}

}  // namespace pdl
