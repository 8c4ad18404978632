#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mesa {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A value outside the mathematical domain of an operation (e.g. a negative density).
class DomainError : public Error {
 public:
  DomainError(const std::string& what, long index) : Error(what), index_(index) {}
  long index() const { return index_; }

 private:
  long index_;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string key, int line = 0)
      : Error(what), key_(std::move(key)), line_(line) {}
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

/// Base for failures raised while a numerical method is running.
class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what, std::vector<double> history = {})
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

class StabilityError : public SolverError {
 public:
  using SolverError::SolverError;
};

class DivergenceError : public SolverError {
 public:
  DivergenceError(const std::string& what, long step) : SolverError(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

class GridTooSmall : public SolverError {
 public:
  using SolverError::SolverError;
};

/// The requested problem is not admissible for the model (e.g. a stationary
/// pressure that would have to go negative).
class ModelingError : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace mesa
