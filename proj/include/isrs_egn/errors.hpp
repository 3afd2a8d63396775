#pragma once

#include <stdexcept>
#include <string>

namespace isrs_egn {

/// Malformed or invalid configuration input (schema, units, invariants).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical evaluation could not produce a trustworthy value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace isrs_egn
