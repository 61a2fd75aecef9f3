#pragma once

#include <stdexcept>
#include <string>

namespace pdl {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct FormatError : Error {
  using Error::Error;
};

struct TruncatedFile : Error {
  using Error::Error;
};

struct NotEnoughPatches : Error {
  using Error::Error;
};

struct PatchTooLarge : Error {
  using Error::Error;
};

struct DegenerateSample : Error {
  using Error::Error;
};

struct NonFiniteObjective : Error {
  using Error::Error;
};

struct InfinitePsnr : Error {
  using Error::Error;
};

}  // namespace pdl
