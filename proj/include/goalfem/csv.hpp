#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "goalfem/errors.hpp"

namespace goalfem {

/// Format a double with 17 significant digits ('.' decimal, locale-free),
/// enough to round-trip the value exactly.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Minimal RFC-4180 writer: callers pass already-safe cells (numbers and
/// plain identifiers), so no quoting logic is needed.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("cannot open for writing: " + path);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out_ << ',';
      out_ << cells[i];
    }
    out_ << "\r\n";
  }

 private:
  std::ofstream out_;
};

}  // namespace goalfem
