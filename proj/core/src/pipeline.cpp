#include "pdl/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <locale>
#include <sstream>

#include "pdl/parallel.hpp"
#include "pdl/prox.hpp"
#include "text_io.hpp"

namespace pdl {

namespace fs = std::filesystem;

using detail::format_double;
using detail::write_text_atomic;

namespace {

double safe_psnr(double rmse_val) {
  return rmse_val == 0.0 ? std::numeric_limits<double>::infinity()
                         : psnr(rmse_val);
}

struct EvalOutcome {
  double rmse = 0.0;
  double psnr_db = 0.0;
  double ssim = 0.0;
  int active_atoms = 0;
  Vector usage;
  double fit_error = 0.0;  // normalized space
  DescriptionLength mdl;
};

// Shared test-side evaluation: encode with the model's hyperparameters,
// reconstruct, denormalize, clamp to pixel range, and score against the raw
// patches.
EvalOutcome evaluate_on(const Matrix& test_raw, const Dictionary& D,
                        const Vector& mu, const Vector& sigma,
                        const HyperParams& hp, int encode_steps, double tol,
                        double usage_threshold) {
  const DataMatrix X_test = normalize_with(test_raw, mu, sigma);
  const CoeffMatrix R = encode(X_test, D, hp, encode_steps, tol);
  const Matrix recon_norm = D.atoms * R.values;
  const Matrix recon = project_box(denormalize(recon_norm, mu, sigma), 0.0, 1.0);
  EvalOutcome outcome;
  outcome.rmse = rmse(test_raw, recon);
  outcome.psnr_db = safe_psnr(outcome.rmse);
  outcome.ssim = ssim_columns_mean(test_raw, recon);
  outcome.usage = atom_usage(R, usage_threshold);
  outcome.active_atoms = active_atom_count(outcome.usage);
  outcome.fit_error = (X_test.values - recon_norm).squaredNorm();
  outcome.mdl = description_length(R, outcome.fit_error);
  return outcome;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

double parse_double(const std::string& s) {
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  double v = 0.0;
  in >> v;
  if (in.fail()) {
    throw FormatError("bad numeric field: " + s);
  }
  return v;
}

}  // namespace

IngestSummary run_ingest(const IngestOptions& opts) {
  DataMatrix patches;
  if (opts.source == IngestSource::kPatchCache) {
    patches = DataMatrix(read_patch_cache(opts.input));
  } else {
    ImageSet images;
    switch (opts.source) {
      case IngestSource::kCifar10:
        images = load_cifar_binary(opts.input, CifarVariant::kCifar10);
        break;
      case IngestSource::kCifar100:
        images = load_cifar_binary(opts.input, CifarVariant::kCifar100);
        break;
      default:
        images = load_gray_images(opts.input);
        break;
    }
    patches = extract_patches(images, opts.patch);
  }
  auto [train, test] = split(patches, opts.patch);
  write_patch_cache(opts.train_out, train.values);
  write_patch_cache(opts.test_out, test.values);
  IngestSummary summary;
  summary.total_patches = patches.samples();
  summary.train_count = opts.patch.train_count;
  summary.test_count = opts.patch.test_count;
  return summary;
}

TrainSummary run_train(const TrainOptions& opts) {
  const DataMatrix raw(read_patch_cache(opts.train_cache));
  const DataMatrix X = normalize(raw, opts.norm_mode);

  SolverConfig cfg = opts.solver;
  TrainSummary summary;
  if (opts.lambda1 && opts.lambda2) {
    cfg.hp.lambda1 = *opts.lambda1;
    cfg.hp.lambda2 = *opts.lambda2;
    summary.report = select_lambda(cfg.hp.beta, cfg.hp.eta, cfg.hp.delta);
  } else {
    try {
      summary.report = pilot_estimate(X, cfg, opts.seed);
      cfg.hp.lambda1 = summary.report.lambda1_theoretical;
      cfg.hp.lambda2 = summary.report.lambda2_theoretical;
    } catch (const DegenerateSample& e) {
      // Unbounded beta MLE: record the +inf sentinel and fall back to the
      // correlation-bound branch with the configured delta.
      std::cerr << "warning: " << e.what() << "\n";
      summary.report.beta_hat = std::numeric_limits<double>::infinity();
      summary.report.eta_hat = 0.0;
      summary.report.delta = cfg.hp.delta;
      summary.report.lambda1_theoretical = cfg.hp.delta;
      cfg.hp.lambda1 = summary.report.lambda1_theoretical;
      cfg.hp.lambda2 = 1.0;
    }
    if (opts.lambda1) cfg.hp.lambda1 = *opts.lambda1;
    if (opts.lambda2) cfg.hp.lambda2 = *opts.lambda2;
  }
  cfg.hp.beta = std::max(cfg.hp.beta, 1.0 + 1e-6);

  const FitResult result = fit(X, cfg, opts.seed);

  Model model;
  model.D = result.D;
  model.mu = X.mu;
  model.sigma = X.sigma;
  model.hp = cfg.hp;
  save_model(opts.model_out, model);
  write_trace_csv(opts.trace_out, result.trace);
  write_lambda_report_csv(opts.report_out, summary.report);
  fs::path report_txt = opts.report_out;
  report_txt.replace_extension(".txt");
  write_lambda_report_text(report_txt, summary.report);

  const TraceRow& last = result.trace.rows.back();
  summary.final_objective = {last.objective_total, last.term_fit, last.term_l1,
                             last.term_linf};
  summary.recorded_iterations = static_cast<int>(result.trace.rows.size());
  return summary;
}

void run_encode(const EncodeOptions& opts) {
  const Model model = load_model(opts.model_path);
  const Matrix raw = read_patch_cache(opts.cache);
  const DataMatrix X = normalize_with(raw, model.mu, model.sigma);
  const CoeffMatrix R = encode(X, model.D, model.hp, opts.encode_steps, opts.tol);
  write_patch_cache(opts.coeff_out, R.values);
}

EvalReport run_eval(const EvalOptions& opts) {
  const Model model = load_model(opts.model_path);
  const Matrix test_raw = read_patch_cache(opts.test_cache);
  const EvalOutcome outcome =
      evaluate_on(test_raw, model.D, model.mu, model.sigma, model.hp,
                  opts.encode_steps, opts.tol, opts.usage_threshold);
  EvalReport report;
  report.rmse = outcome.rmse;
  report.psnr_db = outcome.psnr_db;
  report.ssim = outcome.ssim;
  report.active_atoms = outcome.active_atoms;
  report.usage_freq = outcome.usage;
  report.mdl = outcome.mdl;
  write_eval_csv(opts.eval_out, report);
  write_usage_csv(opts.usage_out, report.usage_freq);
  return report;
}

std::vector<AblateRow> run_ablate(const AblateOptions& opts) {
  const DataMatrix train_raw(read_patch_cache(opts.train_cache));
  const Matrix test_raw = read_patch_cache(opts.test_cache);
  const DataMatrix X = normalize(train_raw, opts.norm_mode);

  const double base_lambda1 =
      opts.lambda1 ? *opts.lambda1
                   : pilot_estimate(X, opts.solver, opts.seed).lambda1_theoretical;

  struct Variant {
    const char* name;
    double lambda1;
    double lambda2;
  };
  const Variant variants[4] = {
      {"full", base_lambda1, 1.0},
      {"no_linf", base_lambda1, 0.0},
      {"no_l1", 0.0, 1.0},
      {"none", 0.0, 0.0},
  };

  std::vector<AblateRow> rows(4);
  parallel_for(4, [&](int v) {
    SolverConfig cfg = opts.solver;
    cfg.hp.lambda1 = variants[v].lambda1;
    cfg.hp.lambda2 = variants[v].lambda2;
    const FitResult fitted = fit(X, cfg, opts.seed);
    const EvalOutcome outcome =
        evaluate_on(test_raw, fitted.D, X.mu, X.sigma, cfg.hp,
                    opts.encode_steps, cfg.tol, opts.usage_threshold);
    rows[static_cast<std::size_t>(v)] = {
        variants[v].name,    variants[v].lambda1, variants[v].lambda2,
        outcome.rmse,        outcome.psnr_db,     outcome.ssim,
        outcome.active_atoms};
  });

  std::ostringstream out;
  out << "config,lambda1,lambda2,rmse,psnr_db,ssim,active_atoms\n";
  for (const AblateRow& row : rows) {
    out << row.config << ',' << format_double(row.lambda1) << ','
        << format_double(row.lambda2) << ',' << format_double(row.rmse) << ','
        << format_double(row.psnr_db) << ',' << format_double(row.ssim) << ','
        << row.active_atoms << "\n";
  }
  write_text_atomic(opts.out_csv, out.str());
  return rows;
}

std::vector<SweepRow> run_sweep(const SweepOptions& opts) {
  if (opts.grid.empty()) {
    throw Error("sweep grid must be non-empty");
  }
  const DataMatrix train_raw(read_patch_cache(opts.train_cache));
  const Matrix test_raw = read_patch_cache(opts.test_cache);
  const DataMatrix X = normalize(train_raw, opts.norm_mode);

  const double theory_lambda1 =
      pilot_estimate(X, opts.solver, opts.seed).lambda1_theoretical;
  std::size_t theory_idx = 0;
  for (std::size_t g = 1; g < opts.grid.size(); ++g) {
    if (std::abs(opts.grid[g] - theory_lambda1) <
        std::abs(opts.grid[theory_idx] - theory_lambda1)) {
      theory_idx = g;
    }
  }

  const int points = static_cast<int>(opts.grid.size());
  std::vector<SweepRow> rows(static_cast<std::size_t>(2 * points));
  parallel_for(2 * points, [&](int job) {
    const int variant = job / points;  // 0 = full, 1 = l1_only
    const std::size_t g = static_cast<std::size_t>(job % points);
    SolverConfig cfg = opts.solver;
    cfg.hp.lambda1 = opts.grid[g];
    cfg.hp.lambda2 = variant == 0 ? 1.0 : 0.0;
    const FitResult fitted = fit(X, cfg, opts.seed);
    const EvalOutcome outcome =
        evaluate_on(test_raw, fitted.D, X.mu, X.sigma, cfg.hp,
                    opts.encode_steps, cfg.tol, opts.usage_threshold);
    SweepRow row;
    row.variant = variant == 0 ? "full" : "l1_only";
    row.lambda1 = opts.grid[g];
    row.theory = g == theory_idx ? 1 : 0;
    row.rmse = outcome.rmse;
    row.psnr_db = outcome.psnr_db;
    row.active_atoms = outcome.active_atoms;
    row.fit_error = outcome.fit_error;
    row.l_data = outcome.mdl.l_data;
    row.l_model = outcome.mdl.l_model;
    row.tdl = outcome.mdl.total;
    rows[static_cast<std::size_t>(job)] = std::move(row);
  });

  std::ostringstream out;
  out << "variant,lambda1,theory,rmse,psnr_db,active_atoms,fit_error,l_data,"
         "l_model,tdl\n";
  for (const SweepRow& row : rows) {
    out << row.variant << ',' << format_double(row.lambda1) << ',' << row.theory
        << ',' << format_double(row.rmse) << ',' << format_double(row.psnr_db)
        << ',' << row.active_atoms << ',' << format_double(row.fit_error) << ','
        << format_double(row.l_data) << ',' << format_double(row.l_model) << ','
        << format_double(row.tdl) << "\n";
  }
  write_text_atomic(opts.out_csv, out.str());
  return rows;
}

std::vector<SweepRow> read_sweep_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError(path.string() + ": empty sweep CSV");
  }
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 10) {
      throw FormatError(path.string() + ": bad sweep row: " + line);
    }
    SweepRow row;
    row.variant = f[0];
    row.lambda1 = parse_double(f[1]);
    row.theory = static_cast<int>(parse_double(f[2]));
    row.rmse = parse_double(f[3]);
    row.psnr_db = parse_double(f[4]);
    row.active_atoms = static_cast<int>(parse_double(f[5]));
    row.fit_error = parse_double(f[6]);
    row.l_data = parse_double(f[7]);
    row.l_model = parse_double(f[8]);
    row.tdl = parse_double(f[9]);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<AblateRow> read_ablate_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError(path.string() + ": empty ablation CSV");
  }
  std::vector<AblateRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 7) {
      throw FormatError(path.string() + ": bad ablation row: " + line);
    }
    AblateRow row;
    row.config = f[0];
    row.lambda1 = parse_double(f[1]);
    row.lambda2 = parse_double(f[2]);
    row.rmse = parse_double(f[3]);
    row.psnr_db = parse_double(f[4]);
    row.ssim = parse_double(f[5]);
    row.active_atoms = static_cast<int>(parse_double(f[6]));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace pdl
