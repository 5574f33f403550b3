#pragma once

#include <stdexcept>
#include <string>

namespace optlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite gradient or objective value handed to an optimizer or oracle.
class NumericInputError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation (e.g. ell <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or length-inconsistent input data.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Operation requires a state that has taken at least one step.
class StateError : public Error {
 public:
  using Error::Error;
};

/// Configuration rejected by validation. `path()` names the offending field,
/// e.g. "optimizers[1].beta2".
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)), message_(what) {}

  const std::string& path() const noexcept { return path_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string path_;
  std::string message_;
};

/// Estimator has no meaning for the requested analysis.
class UnsupportedEstimatorError : public Error {
 public:
  using Error::Error;
};

/// Rate bound requested for a configuration whose hypotheses fail.
/// `violated()` is the first inequality that does not hold.
class BoundNotApplicableError : public Error {
 public:
  explicit BoundNotApplicableError(std::string violated)
      : Error("bound not applicable: " + violated), violated_(std::move(violated)) {}

  const std::string& violated() const noexcept { return violated_; }

 private:
  std::string violated_;
};

}  // namespace optlab
