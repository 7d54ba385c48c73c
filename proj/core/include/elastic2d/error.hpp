#pragma once

#include <stdexcept>
#include <string>

namespace elastic2d {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A mesh or grid failed a geometric validity check (folded cells, J <= 0,
/// nonconforming interfaces).
class InvalidMesh : public Error {
 public:
  using Error::Error;
};

/// A time stepper produced NaN/Inf or unbounded growth.
class InstabilityError : public Error {
 public:
  InstabilityError(const std::string& what, long step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

/// Malformed input file or configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace elastic2d
