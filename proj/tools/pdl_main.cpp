// pdl: dictionary learning over image patches with an elementwise L1 plus
// row-wise L-infinity penalty. Subcommands: ingest, train, encode, eval,
// ablate, sweep.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pdl/pipeline.hpp"

namespace {

struct SolverFlags {
  int atoms = 128;
  int iterations = 100;
  int coeff_steps = 10;
  int dict_steps = 10;
  double tol = 1e-6;
  double beta = 2.0;
  double usage_threshold = 1e-3;
  double step_r = 0.0;
  double step_d = 0.0;
  bool no_reinit = false;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& flags) {
  cmd->add_option("--atoms", flags.atoms, "Dictionary size (atoms)")
      ->capture_default_str();
  cmd->add_option("--t", flags.iterations, "Outer iterations")
      ->capture_default_str();
  cmd->add_option("--k-r", flags.coeff_steps,
                  "Coefficient steps per outer iteration")
      ->capture_default_str();
  cmd->add_option("--k-d", flags.dict_steps,
                  "Dictionary steps per outer iteration")
      ->capture_default_str();
  cmd->add_option("--tol", flags.tol, "Relative objective early-stop tolerance")
      ->capture_default_str();
  cmd->add_option("--beta", flags.beta, "Beta prior shape for initialization")
      ->capture_default_str();
  cmd->add_option("--usage-threshold", flags.usage_threshold,
                  "Row activity threshold")
      ->capture_default_str();
  cmd->add_option("--step-r", flags.step_r,
                  "Fixed coefficient step size (0 = auto)")
      ->capture_default_str();
  cmd->add_option("--step-d", flags.step_d,
                  "Fixed dictionary step size (0 = auto)")
      ->capture_default_str();
  cmd->add_flag("--no-reinit-dead-atoms", flags.no_reinit,
                "Keep dead atoms instead of redrawing them");
}

pdl::SolverConfig to_config(const SolverFlags& flags) {
  pdl::SolverConfig cfg;
  cfg.n_atoms = flags.atoms;
  cfg.hp.iterations = flags.iterations;
  cfg.hp.coeff_steps = flags.coeff_steps;
  cfg.hp.dict_steps = flags.dict_steps;
  cfg.hp.beta = flags.beta;
  cfg.hp.step_coeff = flags.step_r;
  cfg.hp.step_dict = flags.step_d;
  cfg.tol = flags.tol;
  cfg.usage_threshold = flags.usage_threshold;
  cfg.reinit_dead_atoms = !flags.no_reinit;
  return cfg;
}

pdl::NormMode parse_norm_mode(const std::string& name) {
  if (name == "per_feature") return pdl::NormMode::kPerFeature;
  if (name == "global") return pdl::NormMode::kGlobalScalar;
  throw CLI::ValidationError("--norm-mode must be per_feature or global");
}

std::vector<double> build_grid(const std::string& list, double start,
                               double step, double end) {
  std::vector<double> grid;
  if (!list.empty()) {
    std::istringstream in(list);
    std::string token;
    while (std::getline(in, token, ',')) {
      grid.push_back(std::stod(token));
    }
    return grid;
  }
  if (step <= 0.0 || end < start) {
    throw CLI::ValidationError("grid requires start <= end and step > 0");
  }
  for (double v = start; v <= end + 1e-12; v += step) {
    grid.push_back(v);
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dictionary learning with row-sparse coefficient penalties"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Extract patches and write caches");
  ingest->set_config("--config");
  pdl::IngestOptions ingest_opts;
  std::string source = "cifar100";
  ingest->add_option("--input", ingest_opts.input, "Input file or directory")
      ->required();
  ingest->add_option("--source", source, "cifar10|cifar100|pgm|cache")
      ->capture_default_str();
  ingest->add_option("--patch-size", ingest_opts.patch.patch_size)
      ->capture_default_str();
  ingest->add_option("--stride", ingest_opts.patch.stride)->capture_default_str();
  ingest->add_option("--train-count", ingest_opts.patch.train_count)
      ->capture_default_str();
  ingest->add_option("--test-count", ingest_opts.patch.test_count)
      ->capture_default_str();
  ingest->add_option("--seed", ingest_opts.patch.seed)->capture_default_str();
  ingest->add_option("--train-out", ingest_opts.train_out, "Train cache path")
      ->required();
  ingest->add_option("--test-out", ingest_opts.test_out, "Test cache path")
      ->required();

  // train
  auto* train = app.add_subcommand("train", "Fit a dictionary on a train cache");
  train->set_config("--config");
  SolverFlags train_flags;
  pdl::TrainOptions train_opts;
  std::string train_norm = "per_feature";
  double lambda1_flag = 0.0, lambda2_flag = 0.0;
  train->add_option("--train-cache", train_opts.train_cache)->required();
  train->add_option("--model-out", train_opts.model_out)->required();
  train->add_option("--trace-out", train_opts.trace_out)->required();
  train->add_option("--report-out", train_opts.report_out)->required();
  add_solver_flags(train, train_flags);
  auto* l1_opt = train->add_option("--lambda1", lambda1_flag,
                                   "Override the estimated lambda1");
  auto* l2_opt = train->add_option("--lambda2", lambda2_flag,
                                   "Override lambda2 (= 1 by the rule)");
  train->add_option("--seed", train_opts.seed)->capture_default_str();
  train->add_option("--norm-mode", train_norm, "per_feature|global")
      ->capture_default_str();

  // encode
  auto* encode = app.add_subcommand("encode", "Encode a cache with a model");
  encode->set_config("--config");
  pdl::EncodeOptions encode_opts;
  encode->add_option("--model", encode_opts.model_path)->required();
  encode->add_option("--cache", encode_opts.cache)->required();
  encode->add_option("--coeff-out", encode_opts.coeff_out)->required();
  encode->add_option("--encode-steps", encode_opts.encode_steps)
      ->capture_default_str();
  encode->add_option("--tol", encode_opts.tol)->capture_default_str();

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a model on a test cache");
  eval->set_config("--config");
  pdl::EvalOptions eval_opts;
  eval->add_option("--model", eval_opts.model_path)->required();
  eval->add_option("--test-cache", eval_opts.test_cache)->required();
  eval->add_option("--eval-out", eval_opts.eval_out)->required();
  eval->add_option("--usage-out", eval_opts.usage_out)->required();
  eval->add_option("--encode-steps", eval_opts.encode_steps)
      ->capture_default_str();
  eval->add_option("--tol", eval_opts.tol)->capture_default_str();
  eval->add_option("--usage-threshold", eval_opts.usage_threshold)
      ->capture_default_str();

  // ablate
  auto* ablate = app.add_subcommand(
      "ablate", "Train and evaluate the four regularization variants");
  ablate->set_config("--config");
  SolverFlags ablate_flags;
  pdl::AblateOptions ablate_opts;
  std::string ablate_norm = "per_feature";
  double ablate_lambda1 = 0.0;
  ablate->add_option("--train-cache", ablate_opts.train_cache)->required();
  ablate->add_option("--test-cache", ablate_opts.test_cache)->required();
  ablate->add_option("--out", ablate_opts.out_csv)->required();
  add_solver_flags(ablate, ablate_flags);
  auto* ablate_l1 =
      ablate->add_option("--lambda1", ablate_lambda1, "Base lambda1");
  ablate->add_option("--seed", ablate_opts.seed)->capture_default_str();
  ablate->add_option("--encode-steps", ablate_opts.encode_steps)
      ->capture_default_str();
  ablate->add_option("--norm-mode", ablate_norm)->capture_default_str();

  // sweep
  auto* sweep = app.add_subcommand(
      "sweep", "Sweep lambda1 for the full and L1-only variants");
  sweep->set_config("--config");
  SolverFlags sweep_flags;
  pdl::SweepOptions sweep_opts;
  std::string sweep_norm = "per_feature";
  std::string grid_list;
  double grid_start = 0.5, grid_step = 0.25, grid_end = 3.0;
  sweep->add_option("--train-cache", sweep_opts.train_cache)->required();
  sweep->add_option("--test-cache", sweep_opts.test_cache)->required();
  sweep->add_option("--out", sweep_opts.out_csv)->required();
  add_solver_flags(sweep, sweep_flags);
  sweep->add_option("--grid", grid_list, "Comma-separated lambda1 values");
  sweep->add_option("--grid-start", grid_start)->capture_default_str();
  sweep->add_option("--grid-step", grid_step)->capture_default_str();
  sweep->add_option("--grid-end", grid_end)->capture_default_str();
  sweep->add_option("--seed", sweep_opts.seed)->capture_default_str();
  sweep->add_option("--encode-steps", sweep_opts.encode_steps)
      ->capture_default_str();
  sweep->add_option("--norm-mode", sweep_norm)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      if (source == "cifar10") ingest_opts.source = pdl::IngestSource::kCifar10;
      else if (source == "cifar100") ingest_opts.source = pdl::IngestSource::kCifar100;
      else if (source == "pgm") ingest_opts.source = pdl::IngestSource::kPgmDir;
      else if (source == "cache") ingest_opts.source = pdl::IngestSource::kPatchCache;
      else throw pdl::Error("unknown source: " + source);
      const auto summary = pdl::run_ingest(ingest_opts);
      std::cout << "patches " << summary.total_patches << " train "
                << summary.train_count << " test " << summary.test_count
                << "\n";
    } else if (*train) {
      train_opts.solver = to_config(train_flags);
      train_opts.norm_mode = parse_norm_mode(train_norm);
      if (l1_opt->count() > 0) train_opts.lambda1 = lambda1_flag;
      if (l2_opt->count() > 0) train_opts.lambda2 = lambda2_flag;
      const auto summary = pdl::run_train(train_opts);
      std::cout << "lambda1 " << summary.report.lambda1_theoretical
                << " lambda2 " << summary.report.lambda2_theoretical
                << " objective " << summary.final_objective.total
                << " iterations " << summary.recorded_iterations - 1 << "\n";
    } else if (*encode) {
      pdl::run_encode(encode_opts);
      std::cout << "coefficients written to " << encode_opts.coeff_out.string()
                << "\n";
    } else if (*eval) {
      const auto report = pdl::run_eval(eval_opts);
      std::cout << "rmse " << report.rmse << " psnr_db " << report.psnr_db
                << " ssim " << report.ssim << " active_atoms "
                << report.active_atoms << "\n";
    } else if (*ablate) {
      ablate_opts.solver = to_config(ablate_flags);
      ablate_opts.norm_mode = parse_norm_mode(ablate_norm);
      if (ablate_l1->count() > 0) ablate_opts.lambda1 = ablate_lambda1;
      const auto rows = pdl::run_ablate(ablate_opts);
      for (const auto& row : rows) {
        std::cout << row.config << " rmse " << row.rmse << " active "
                  << row.active_atoms << "\n";
      }
    } else if (*sweep) {
      sweep_opts.solver = to_config(sweep_flags);
      sweep_opts.norm_mode = parse_norm_mode(sweep_norm);
      sweep_opts.grid = build_grid(grid_list, grid_start, grid_step, grid_end);
      const auto rows = pdl::run_sweep(sweep_opts);
      std::cout << rows.size() << " sweep rows written to "
                << sweep_opts.out_csv.string() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
