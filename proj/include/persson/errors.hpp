#pragma once

#include <stdexcept>
#include <string>

namespace persson {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Mismatched indices, kernels from different spaces, malformed inputs.
class StructuralError : public Error {
public:
  using Error::Error;
};

/// A space or model failed one of its defining axioms.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A window is too small for the requested radius or margin.
class RangeError : public Error {
public:
  using Error::Error;
};

/// An operation was called outside its documented domain.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// Job configuration problems. `pointer` is a JSON pointer into the config.
class ConfigError : public Error {
public:
  ConfigError(std::string pointer, const std::string& what)
      : Error(pointer + ": " + what), pointer_(std::move(pointer)) {}

  const std::string& pointer() const { return pointer_; }

private:
  std::string pointer_;
};

/// Monotonicity audit failure in the compression ladder.
class AuditError : public Error {
public:
  using Error::Error;
};

}  // namespace persson
