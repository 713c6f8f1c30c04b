#pragma once

#include <stdexcept>
#include <string>

namespace goalfem {

/// Invalid user input: bad mesh sizes, unknown benchmark ids, malformed files.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical breakdown: failed factorizations, non-finite losses.
/// The message names the offending matrix or quantity.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace goalfem
