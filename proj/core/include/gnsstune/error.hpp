#pragma once

#include <stdexcept>
#include <string>

namespace gnsstune {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A physical state outside the domain of a model (e.g. below the Earth's surface).
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

/// Numerical integration produced a non-finite state.
class PropagationError : public Error {
 public:
  using Error::Error;
};

/// Line-of-sight geometry is degenerate (zero range).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A loop configuration failed the discrete-time stability guard.
class ConfigRejectedError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent user configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Inputs to an evaluation do not overlap or are otherwise unusable.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

}  // namespace gnsstune
