#pragma once

#include <stdexcept>
#include <string>

namespace segforge {

// Bad inputs: dimension mismatches, out-of-range labels, malformed configs.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem / decode / encode failures.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace segforge
