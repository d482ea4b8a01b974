// Copyright 2026 The synlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace synlab {

// Invalid parameters, malformed config files, bad CLI arguments.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Failure reading or writing a data product.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A fit did not converge and the caller asked for strict behaviour.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& what) {
  if (!condition) {
    throw ConfigError(what);
  }
}

}  // namespace detail
}  // namespace synlab
