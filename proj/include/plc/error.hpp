#pragma once

#include <stdexcept>
#include <string>

namespace plc {

/// Invalid geometry, parameters or configuration (CLI exit code 4).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A grid whose resolution cannot support the requested operation.
class GridTooCoarse : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Argument outside the mathematical domain of a formula.
class DomainViolation : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Eigensolver failure (CLI exit code 3).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File format or filesystem failure (CLI exit code 2).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace plc
