// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace hrom {

// Error taxonomy. The CLI maps these onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid geometry, parameter ranges or out-of-domain evaluation points.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Bad user configuration (unknown keys, bad values, non-positive penalty).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Singular factorizations, failed eigensolves, non-convergent quadrature.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Shape or dimension mismatch between collaborating objects.
class StructuralError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hrom
