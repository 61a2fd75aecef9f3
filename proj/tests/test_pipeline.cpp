#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "pdl/pipeline.hpp"
#include "pdl/rng.hpp"
#include "pdl/synth.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_pgm8(const fs::path& p, const pdl::Matrix& img) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << "P5\n" << img.cols() << " " << img.rows() << "\n255\n";
  for (Eigen::Index r = 0; r < img.rows(); ++r) {
    for (Eigen::Index c = 0; c < img.cols(); ++c) {
      out.put(static_cast<char>(static_cast<int>(img(r, c) * 255.0 + 0.5)));
    }
  }
}

// Small synthetic cache pair for the training-side commands.
void write_synth_caches(const fs::path& train, const fs::path& test,
                        int m_train, int m_test, std::uint64_t seed) {
  pdl::SynthConfig cfg;
  cfg.dim = 16;
  cfg.n_atoms = 6;
  cfg.samples = m_train + m_test;
  cfg.sigma_noise = 0.05;
  cfg.seed = seed;
  const auto data = pdl::generate(cfg);
  pdl::write_patch_cache(train, data.X.values.leftCols(m_train));
  pdl::write_patch_cache(test, data.X.values.rightCols(m_test));
}

int count_rows(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  int rows = -1;  // skip header
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  return rows;
}

}  // namespace

TEST_CASE("ingest pipeline writes disjoint caches from pgm images") {
  TempDir dir("pdl_pipe_ingest");
  fs::create_directories(dir.path / "imgs");
  pdl::Rng rng(51);
  for (int i = 0; i < 3; ++i) {
    pdl::Matrix img(32, 32);
    for (Eigen::Index k = 0; k < img.size(); ++k) {
      img(k / 32, k % 32) = rng.uniform01();
    }
    write_pgm8(dir.path / "imgs" / ("img" + std::to_string(i) + ".pgm"), img);
  }
  pdl::IngestOptions opts;
  opts.input = dir.path / "imgs";
  opts.source = pdl::IngestSource::kPgmDir;
  opts.patch.train_count = 30;
  opts.patch.test_count = 10;
  opts.patch.seed = 5;
  opts.train_out = dir.path / "train.pdl1";
  opts.test_out = dir.path / "test.pdl1";
  const auto summary = pdl::run_ingest(opts);
  CHECK(summary.total_patches == 48);  // 3 images x 16 patches
  const pdl::Matrix train = pdl::read_patch_cache(opts.train_out);
  const pdl::Matrix test = pdl::read_patch_cache(opts.test_out);
  CHECK(train.cols() == 30);
  CHECK(test.cols() == 10);
  CHECK(train.rows() == 64);
}

TEST_CASE("train-encode-eval pipeline produces coherent artifacts") {
  TempDir dir("pdl_pipe_train");
  const fs::path train_cache = dir.path / "train.pdl1";
  const fs::path test_cache = dir.path / "test.pdl1";
  write_synth_caches(train_cache, test_cache, 200, 40, 53);

  pdl::TrainOptions topts;
  topts.train_cache = train_cache;
  topts.model_out = dir.path / "model.pdlm";
  topts.trace_out = dir.path / "trace.csv";
  topts.report_out = dir.path / "report.csv";
  topts.solver.n_atoms = 6;
  topts.solver.hp.iterations = 15;
  topts.seed = 54;
  const auto summary = pdl::run_train(topts);
  CHECK(fs::exists(topts.model_out));
  CHECK(fs::exists(topts.trace_out));
  CHECK(fs::exists(topts.report_out));
  CHECK(fs::exists(dir.path / "report.txt"));
  CHECK(summary.final_objective.total > 0.0);
  CHECK(summary.report.lambda2_theoretical == 1.0);

  const pdl::Model model = pdl::load_model(topts.model_out);
  CHECK(model.D.n_atoms() == 6);
  CHECK(model.hp.lambda1 == summary.report.lambda1_theoretical);

  pdl::EncodeOptions eopts;
  eopts.model_path = topts.model_out;
  eopts.cache = test_cache;
  eopts.coeff_out = dir.path / "coeffs.pdl1";
  eopts.encode_steps = 100;
  pdl::run_encode(eopts);
  const pdl::Matrix coeffs = pdl::read_patch_cache(eopts.coeff_out);
  CHECK(coeffs.rows() == 6);
  CHECK(coeffs.cols() == 40);

  pdl::EvalOptions vopts;
  vopts.model_path = topts.model_out;
  vopts.test_cache = test_cache;
  vopts.eval_out = dir.path / "eval.csv";
  vopts.usage_out = dir.path / "usage.csv";
  vopts.encode_steps = 100;
  const auto report = pdl::run_eval(vopts);
  CHECK(report.rmse >= 0.0);
  CHECK(report.ssim <= 1.0 + 1e-12);
  CHECK(report.usage_freq.size() == 6);
  CHECK(report.active_atoms >= 0);
  CHECK(count_rows(vopts.eval_out) == 1);
  CHECK(count_rows(vopts.usage_out) == 6);
}

TEST_CASE("lambda overrides bypass the pilot estimate") {
  TempDir dir("pdl_pipe_override");
  const fs::path train_cache = dir.path / "train.pdl1";
  const fs::path test_cache = dir.path / "test.pdl1";
  write_synth_caches(train_cache, test_cache, 150, 30, 55);

  pdl::TrainOptions topts;
  topts.train_cache = train_cache;
  topts.model_out = dir.path / "model.pdlm";
  topts.trace_out = dir.path / "trace.csv";
  topts.report_out = dir.path / "report.csv";
  topts.solver.n_atoms = 4;
  topts.solver.hp.iterations = 5;
  topts.lambda1 = 0.25;
  topts.lambda2 = 0.0;
  topts.seed = 56;
  pdl::run_train(topts);
  const pdl::Model model = pdl::load_model(topts.model_out);
  CHECK(model.hp.lambda1 == 0.25);
  CHECK(model.hp.lambda2 == 0.0);
}

TEST_CASE("ablation emits the four shared-seed variants in order") {
  TempDir dir("pdl_pipe_ablate");
  const fs::path train_cache = dir.path / "train.pdl1";
  const fs::path test_cache = dir.path / "test.pdl1";
  write_synth_caches(train_cache, test_cache, 150, 30, 57);

  pdl::AblateOptions opts;
  opts.train_cache = train_cache;
  opts.test_cache = test_cache;
  opts.out_csv = dir.path / "ablate.csv";
  opts.solver.n_atoms = 6;
  opts.solver.hp.iterations = 10;
  opts.lambda1 = 0.5;
  opts.seed = 58;
  opts.encode_steps = 100;
  const auto rows = pdl::run_ablate(opts);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].config == "full");
  CHECK(rows[1].config == "no_linf");
  CHECK(rows[2].config == "no_l1");
  CHECK(rows[3].config == "none");
  CHECK(rows[0].lambda1 == 0.5);
  CHECK(rows[0].lambda2 == 1.0);
  CHECK(rows[1].lambda2 == 0.0);
  CHECK(rows[2].lambda1 == 0.0);
  CHECK(rows[3].lambda1 == 0.0);
  CHECK(rows[3].lambda2 == 0.0);

  const auto back = pdl::read_ablate_csv(opts.out_csv);
  REQUIRE(back.size() == 4);
  CHECK(back[0].rmse == rows[0].rmse);
  CHECK(back[3].active_atoms == rows[3].active_atoms);
}

TEST_CASE("sweep emits two variants per grid point with one theory flag each") {
  TempDir dir("pdl_pipe_sweep");
  const fs::path train_cache = dir.path / "train.pdl1";
  const fs::path test_cache = dir.path / "test.pdl1";
  write_synth_caches(train_cache, test_cache, 150, 30, 59);

  pdl::SweepOptions opts;
  opts.train_cache = train_cache;
  opts.test_cache = test_cache;
  opts.out_csv = dir.path / "sweep.csv";
  opts.solver.n_atoms = 6;
  opts.solver.hp.iterations = 8;
  opts.grid = {0.5, 1.0, 1.5};
  opts.seed = 60;
  opts.encode_steps = 80;
  const auto rows = pdl::run_sweep(opts);
  REQUIRE(rows.size() == 6);
  int full_rows = 0, l1_rows = 0, theory_flags = 0;
  for (const auto& row : rows) {
    if (row.variant == "full") ++full_rows;
    if (row.variant == "l1_only") ++l1_rows;
    theory_flags += row.theory;
    CHECK(row.tdl == doctest::Approx(row.l_data + row.l_model).epsilon(1e-12));
  }
  CHECK(full_rows == 3);
  CHECK(l1_rows == 3);
  CHECK(theory_flags == 2);  // one flagged point per variant

  const auto back = pdl::read_sweep_csv(opts.out_csv);
  REQUIRE(back.size() == 6);
  CHECK(back[0].variant == "full");
  CHECK(back[0].lambda1 == rows[0].lambda1);
  CHECK(back[5].tdl == rows[5].tdl);
}

TEST_CASE("parallel execution does not change results") {
  TempDir dir("pdl_pipe_threads");
  const fs::path train_cache = dir.path / "train.pdl1";
  const fs::path test_cache = dir.path / "test.pdl1";
  write_synth_caches(train_cache, test_cache, 120, 24, 61);

  pdl::AblateOptions opts;
  opts.train_cache = train_cache;
  opts.test_cache = test_cache;
  opts.solver.n_atoms = 4;
  opts.solver.hp.iterations = 6;
  opts.lambda1 = 0.4;
  opts.seed = 62;
  opts.encode_steps = 50;

  setenv("PDL_THREADS", "1", 1);
  opts.out_csv = dir.path / "serial.csv";
  const auto serial = pdl::run_ablate(opts);
  setenv("PDL_THREADS", "4", 1);
  opts.out_csv = dir.path / "parallel.csv";
  const auto parallel = pdl::run_ablate(opts);
  unsetenv("PDL_THREADS");
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].rmse == parallel[i].rmse);
    CHECK(serial[i].active_atoms == parallel[i].active_atoms);
  }
}
