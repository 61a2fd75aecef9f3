#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "pdl/core_types.hpp"
#include "pdl/errors.hpp"

namespace pdl::detail {

inline void write_u32le(std::ostream& out, std::uint32_t v) {
  const unsigned char bytes[4] = {
      static_cast<unsigned char>(v & 0xff),
      static_cast<unsigned char>((v >> 8) & 0xff),
      static_cast<unsigned char>((v >> 16) & 0xff),
      static_cast<unsigned char>((v >> 24) & 0xff),
  };
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

inline std::uint32_t read_u32le(std::istream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  if (!in) {
    throw TruncatedFile("unexpected end of file while reading u32");
  }
  return static_cast<std::uint32_t>(bytes[0]) |
         (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

inline void write_f64le(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) {
    bytes[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

inline double read_f64le(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) {
    throw TruncatedFile("unexpected end of file while reading f64");
  }
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  }
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

// Column-major stream of float64 LE values.
inline void write_matrix_values(std::ostream& out, const Matrix& m) {
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) {
      write_f64le(out, m(r, c));
    }
  }
}

inline Matrix read_matrix_values(std::istream& in, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) {
      m(r, c) = read_f64le(in);
    }
  }
  return m;
}

}  // namespace pdl::detail
