#pragma once

#include <stdexcept>
#include <string>

namespace capdemand {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (CSV, JSON, or a flag value), with position info
/// in the message where available.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A domain invariant was violated while constructing a value type.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A scalar argument is outside the function's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The estimation input is degenerate (sample too small, no price
/// variation, leverage at 1, wrong-signed slope).
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// A welfare scenario failed; the message carries the scenario label.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

/// Filesystem read/write failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace capdemand
