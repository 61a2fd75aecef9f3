#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pdl/core_types.hpp"

namespace pdl {

/// Grayscale images with entries in [0, 1]; all images in one set share the
/// same height and width.
struct ImageSet {
  std::vector<Matrix> images;
  std::string source_tag;
};

enum class CifarVariant { kCifar10, kCifar100 };

/// Patch extraction and split protocol. stride == patch_size gives
/// non-overlapping patches.
struct PatchConfig {
  int patch_size = 8;
  int stride = 8;
  int train_count = 20000;
  int test_count = 2000;
  std::uint64_t seed = 0;
};

enum class NormMode { kPerFeature, kGlobalScalar };

/// Reads a CIFAR binary file (label byte(s) + 3072 RGB pixel bytes per
/// record), discards labels, converts to grayscale with luma weights
/// (0.299, 0.587, 0.114) and scales into [0, 1].
ImageSet load_cifar_binary(const std::filesystem::path& path, CifarVariant variant);

/// Reads every binary PGM (P5) file in a directory, in lexicographic order.
/// maxval 255 or 65535 (big-endian 16-bit); values scaled into [0, 1].
ImageSet load_gray_images(const std::filesystem::path& dir);

/// Flattens each patch_size x patch_size window (row-major) into one column;
/// patches are enumerated image by image, top-left to bottom-right.
DataMatrix extract_patches(const ImageSet& imgs, const PatchConfig& cfg);

/// Per-feature (or global-scalar) standardization with population std and a
/// 1e-8 floor on sigma. The statistics are stored for denormalization.
DataMatrix normalize(const DataMatrix& raw, NormMode mode = NormMode::kPerFeature);

/// Applies previously computed statistics (train statistics reused for test).
DataMatrix normalize_with(const Matrix& raw, const Vector& mu, const Vector& sigma);

/// Inverse of normalize: sigma .* values + mu, columnwise.
Matrix denormalize(const DataMatrix& X);
Matrix denormalize(const Matrix& values, const Vector& mu, const Vector& sigma);

/// Disjoint uniform train/test subsets drawn with the documented seeded
/// shuffle; deterministic for a fixed seed.
std::pair<DataMatrix, DataMatrix> split(const DataMatrix& X, const PatchConfig& cfg);

/// Patch cache file: magic "PDL1", u32 LE d, u32 LE m, then d*m float64 LE
/// values in column-major order.
void write_patch_cache(const std::filesystem::path& path, const Matrix& values);
Matrix read_patch_cache(const std::filesystem::path& path);

}  // namespace pdl
