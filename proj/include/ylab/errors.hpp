#pragma once

#include <stdexcept>
#include <string>

namespace ylab {

// Bad user-supplied values: non-finite entries, invalid specs, malformed config.
class invalid_input_error : public std::runtime_error {
 public:
  explicit invalid_input_error(const std::string& what) : std::runtime_error(what) {}
};

// A documented precondition of an operation was violated by the caller.
class contract_error : public std::runtime_error {
 public:
  explicit contract_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure at runtime: unattainable target, degenerate variance,
// rank-deficient system, singular window.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ylab
