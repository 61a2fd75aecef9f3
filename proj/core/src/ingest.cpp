#include "pdl/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include "binary_io.hpp"
#include "pdl/rng.hpp"

namespace pdl {

namespace fs = std::filesystem;

namespace {

constexpr int kCifarSide = 32;
constexpr std::size_t kCifarPixels = 1024;  // one 32x32 channel plane
constexpr double kSigmaFloor = 1e-8;

std::vector<unsigned char> read_all_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<unsigned char> bytes(static_cast<std::size_t>(size));
  if (size > 0) {
    in.read(reinterpret_cast<char*>(bytes.data()), size);
  }
  if (!in) {
    throw IoError("read failed on " + path.string());
  }
  return bytes;
}

// PGM header token reader: skips whitespace and '#' comment lines.
std::string next_pgm_token(std::istream& in) {
  std::string token;
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (!std::isspace(ch)) {
      break;
    }
    ch = in.get();
  }
  while (ch != EOF && !std::isspace(ch)) {
    token.push_back(static_cast<char>(ch));
    ch = in.get();
  }
  return token;
}

Matrix load_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  if (next_pgm_token(in) != "P5") {
    throw FormatError(path.string() + ": not a binary PGM (P5) file");
  }
  long w = 0, h = 0, maxval = 0;
  try {
    w = std::stol(next_pgm_token(in));
    h = std::stol(next_pgm_token(in));
    maxval = std::stol(next_pgm_token(in));
  } catch (const std::exception&) {
    throw FormatError(path.string() + ": malformed PGM header");
  }
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535) {
    throw FormatError(path.string() + ": invalid PGM dimensions or maxval");
  }
  const bool wide = maxval > 255;
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * (wide ? 2 : 1);
  std::vector<unsigned char> data(need);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(need));
  if (static_cast<std::size_t>(in.gcount()) != need) {
    throw TruncatedFile(path.string() + ": PGM pixel data truncated");
  }
  Matrix img(h, w);
  const double scale = 1.0 / static_cast<double>(maxval);
  std::size_t pos = 0;
  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < w; ++c) {
      unsigned v;
      if (wide) {
        v = (static_cast<unsigned>(data[pos]) << 8) | data[pos + 1];  // big-endian
        pos += 2;
      } else {
        v = data[pos++];
      }
      img(r, c) = static_cast<double>(v) * scale;
    }
  }
  return img;
}

}  // namespace

ImageSet load_cifar_binary(const fs::path& path, CifarVariant variant) {
  const std::size_t label_bytes = variant == CifarVariant::kCifar10 ? 1 : 2;
  const std::size_t record_size = label_bytes + 3 * kCifarPixels;
  const auto bytes = read_all_bytes(path);
  if (bytes.empty() || bytes.size() % record_size != 0) {
    std::ostringstream msg;
    msg << path.string() << ": length " << bytes.size()
        << " is not a positive multiple of record size " << record_size;
    throw TruncatedFile(msg.str());
  }
  const std::size_t n_records = bytes.size() / record_size;
  ImageSet set;
  set.source_tag = variant == CifarVariant::kCifar10 ? "cifar10" : "cifar100";
  set.images.reserve(n_records);
  for (std::size_t rec = 0; rec < n_records; ++rec) {
    const unsigned char* r_plane = bytes.data() + rec * record_size + label_bytes;
    const unsigned char* g_plane = r_plane + kCifarPixels;
    const unsigned char* b_plane = g_plane + kCifarPixels;
    Matrix img(kCifarSide, kCifarSide);
    for (int row = 0; row < kCifarSide; ++row) {
      for (int col = 0; col < kCifarSide; ++col) {
        const std::size_t p = static_cast<std::size_t>(row) * kCifarSide + col;
        const double gray =
            0.299 * r_plane[p] + 0.587 * g_plane[p] + 0.114 * b_plane[p];
        img(row, col) = gray / 255.0;
      }
    }
    set.images.push_back(std::move(img));
  }
  return set;
}

ImageSet load_gray_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw IoError(dir.string() + " is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) {
    throw IoError(dir.string() + " contains no files");
  }
  std::sort(files.begin(), files.end());
  ImageSet set;
  set.source_tag = dir.filename().string();
  set.images.reserve(files.size());
  for (const auto& file : files) {
    Matrix img = load_pgm(file);
    if (!set.images.empty() && (img.rows() != set.images.front().rows() ||
                                img.cols() != set.images.front().cols())) {
      std::ostringstream msg;
      msg << file.string() << ": size " << img.rows() << "x" << img.cols()
          << " differs from first image " << set.images.front().rows() << "x"
          << set.images.front().cols();
      throw FormatError(msg.str());
    }
    set.images.push_back(std::move(img));
  }
  return set;
}

DataMatrix extract_patches(const ImageSet& imgs, const PatchConfig& cfg) {
  if (imgs.images.empty()) {
    throw DimensionMismatch("image set is empty");
  }
  const Index h = imgs.images.front().rows();
  const Index w = imgs.images.front().cols();
  const int ps = cfg.patch_size;
  const int stride = cfg.stride;
  if (ps < 1 || stride < 1) {
    throw PatchTooLarge("patch_size and stride must be positive");
  }
  if (ps > h || ps > w) {
    std::ostringstream msg;
    msg << "patch size " << ps << " exceeds image size " << h << "x" << w;
    throw PatchTooLarge(msg.str());
  }
  const Index ny = (h - ps) / stride + 1;
  const Index nx = (w - ps) / stride + 1;
  const Index d = static_cast<Index>(ps) * ps;
  const Index m = static_cast<Index>(imgs.images.size()) * ny * nx;
  Matrix out(d, m);
  Index col = 0;
  for (const Matrix& img : imgs.images) {
    for (Index py = 0; py < ny; ++py) {
      for (Index px = 0; px < nx; ++px) {
        // Row-major flattening of the ps x ps window.
        for (int r = 0; r < ps; ++r) {
          for (int c = 0; c < ps; ++c) {
            out(static_cast<Index>(r) * ps + c, col) =
                img(py * stride + r, px * stride + c);
          }
        }
        ++col;
      }
    }
  }
  return DataMatrix(std::move(out));
}

DataMatrix normalize(const DataMatrix& raw, NormMode mode) {
  const Index d = raw.dim();
  const Index m = raw.samples();
  if (m < 2) {
    throw DimensionMismatch("normalization needs at least 2 samples");
  }
  Vector mu(d);
  Vector sigma(d);
  if (mode == NormMode::kPerFeature) {
    for (Index i = 0; i < d; ++i) {
      const double mean = raw.values.row(i).mean();
      const double var =
          (raw.values.row(i).array() - mean).square().sum() / static_cast<double>(m);
      mu[i] = mean;
      sigma[i] = std::max(std::sqrt(var), kSigmaFloor);
    }
  } else {
    const double mean = raw.values.mean();
    const double var = (raw.values.array() - mean).square().sum() /
                       static_cast<double>(d * m);
    mu.setConstant(mean);
    sigma.setConstant(std::max(std::sqrt(var), kSigmaFloor));
  }
  Matrix normalized = (raw.values.colwise() - mu).array().colwise() / sigma.array();
  return DataMatrix(std::move(normalized), std::move(mu), std::move(sigma));
}

DataMatrix normalize_with(const Matrix& raw, const Vector& mu, const Vector& sigma) {
  if (mu.size() != raw.rows() || sigma.size() != raw.rows()) {
    throw DimensionMismatch("statistics do not match feature dimension");
  }
  Matrix normalized = (raw.colwise() - mu).array().colwise() / sigma.array();
  return DataMatrix(std::move(normalized), mu, sigma);
}

Matrix denormalize(const Matrix& values, const Vector& mu, const Vector& sigma) {
  return (values.array().colwise() * sigma.array()).colwise() + mu.array();
}

Matrix denormalize(const DataMatrix& X) {
  return denormalize(X.values, X.mu, X.sigma);
}

std::pair<DataMatrix, DataMatrix> split(const DataMatrix& X, const PatchConfig& cfg) {
  const Index m = X.samples();
  const Index want = static_cast<Index>(cfg.train_count) + cfg.test_count;
  if (cfg.train_count < 1 || cfg.test_count < 1) {
    throw NotEnoughPatches("train_count and test_count must be positive");
  }
  if (m < want) {
    std::ostringstream msg;
    msg << "need " << want << " patches, have " << m;
    throw NotEnoughPatches(msg.str());
  }
  // Partial Fisher-Yates over the index array: position i receives a uniform
  // draw from [i, m). First train_count indices train, next test_count test.
  std::vector<Index> idx(static_cast<std::size_t>(m));
  std::iota(idx.begin(), idx.end(), Index{0});
  Rng rng(cfg.seed);
  for (Index i = 0; i < want; ++i) {
    const Index j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(m - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  Matrix train(X.dim(), cfg.train_count);
  Matrix test(X.dim(), cfg.test_count);
  for (int i = 0; i < cfg.train_count; ++i) {
    train.col(i) = X.values.col(idx[static_cast<std::size_t>(i)]);
  }
  for (int i = 0; i < cfg.test_count; ++i) {
    test.col(i) = X.values.col(idx[static_cast<std::size_t>(cfg.train_count + i)]);
  }
  return {DataMatrix(std::move(train), X.mu, X.sigma),
          DataMatrix(std::move(test), X.mu, X.sigma)};
}

void write_patch_cache(const fs::path& path, const Matrix& values) {
  if (values.rows() < 1 || values.cols() < 1) {
    throw DimensionMismatch("refusing to write an empty patch cache");
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open " + tmp.string() + " for writing");
    }
    out.write("PDL1", 4);
    detail::write_u32le(out, static_cast<std::uint32_t>(values.rows()));
    detail::write_u32le(out, static_cast<std::uint32_t>(values.cols()));
    detail::write_matrix_values(out, values);
    if (!out) {
      throw IoError("write failed on " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

Matrix read_patch_cache(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string_view(magic, 4) != "PDL1") {
    throw FormatError(path.string() + ": bad patch cache magic");
  }
  const std::uint32_t d = detail::read_u32le(in);
  const std::uint32_t m = detail::read_u32le(in);
  if (d < 1 || m < 1) {
    throw FormatError(path.string() + ": empty patch cache");
  }
  Matrix values = detail::read_matrix_values(in, d, m);
  return values;
}

}  // namespace pdl
