#pragma once

#include <filesystem>
#include <fstream>
#include <locale>
#include <sstream>
#include <string>

#include "pdl/errors.hpp"

namespace pdl::detail {

// Locale-independent shortest-roundtrip formatting for CSV and key=value
// output ('.' decimal separator always).
inline std::string format_double(double v) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(17);
  out << v;
  return out.str();
}

inline void write_text_atomic(const std::filesystem::path& path,
                              const std::string& body) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) {
      throw IoError("cannot open " + tmp.string() + " for writing");
    }
    out << body;
    if (!out) {
      throw IoError("write failed on " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace pdl::detail
