#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cic {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed markup in a robot description. Carries 1-based line/column.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& msg, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", col " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Well-formed input that violates a model-level rule (dangling link,
/// duplicate name, non-tree graph, unsupported joint kind, ...).
class SemanticError : public Error {
 public:
  using Error::Error;
};

/// base/tip pair that does not describe a usable serial chain.
class PathError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NonFiniteInput : public Error {
 public:
  using Error::Error;
};

/// Mass matrix condition number above the degeneracy threshold.
class SingularMassMatrix : public Error {
 public:
  using Error::Error;
};

class EmptyTrajectory : public Error {
 public:
  using Error::Error;
};

class NonMonotoneTimestamps : public Error {
 public:
  using Error::Error;
};

/// Scenario/config document that fails schema validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Simulation state became NaN/inf; message carries the last good timestamp.
class NonFiniteState : public Error {
 public:
  NonFiniteState(const std::string& msg, double last_good_time)
      : Error(msg), last_good_time_(last_good_time) {}

  double last_good_time() const { return last_good_time_; }

 private:
  double last_good_time_;
};

class WindowTooLong : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cic
