#pragma once

#include <stdexcept>
#include <string>

namespace urex {

/// Raised for malformed or inconsistent input data (bad corpus lines, length
/// mismatches, missing labels). The CLI maps it to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for invalid configuration values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace urex
