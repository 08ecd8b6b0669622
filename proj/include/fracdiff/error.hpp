#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracdiff {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (out-of-range order, bad sizes, ...).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Elimination hit a zero or denormal pivot.
class SingularSystem : public Error {
public:
  explicit SingularSystem(std::size_t pivot)
      : Error("singular tridiagonal system: vanishing pivot at row " + std::to_string(pivot)),
        pivot_(pivot) {}

  std::size_t pivot() const noexcept { return pivot_; }

private:
  std::size_t pivot_;
};

/// An internal invariant (e.g. diagonal dominance of an assembled system) failed.
class InvariantViolation : public Error {
public:
  using Error::Error;
};

/// Adaptive quadrature did not reach the requested tolerance.
class QuadratureFailure : public Error {
public:
  using Error::Error;
};

} // namespace fracdiff
