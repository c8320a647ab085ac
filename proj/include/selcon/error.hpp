#pragma once

#include <stdexcept>
#include <string>

namespace selcon {

// Malformed input data or violated schema invariant. CLI maps this to exit 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Requested risk level below the minimum the calibration set can certify.
// CLI maps this to exit 3 unless --force is given.
class RiskError : public std::runtime_error {
 public:
  explicit RiskError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace selcon
