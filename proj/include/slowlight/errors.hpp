#pragma once

#include <stdexcept>
#include <string>

namespace slowlight {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the range a model is valid for (e.g. temperature).
class RangeError : public Error {
 public:
  using Error::Error;
};

/// |chi| too large for the linearized index n = 1 + chi/2.
class ModelValidityError : public Error {
 public:
  using Error::Error;
};

class RootNotFoundError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a precondition (mismatched grids, bad sizes, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Propagated field reaches the edge of the time window.
class WraparoundError : public Error {
 public:
  using Error::Error;
};

class MetricUndefinedError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Malformed catalog or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace slowlight
