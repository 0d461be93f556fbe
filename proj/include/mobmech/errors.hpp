#pragma once

#include <stdexcept>
#include <string>

namespace mobmech {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes disagree (matrix/vector sizes, traveler or service counts).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The mechanism could not be evaluated for the given instance.
class MechanismError : public Error {
 public:
  using Error::Error;
};

/// An internal invariant failed; indicates a bug rather than bad input.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// A brute-force search was asked to enumerate too many points.
class CapacityError : public Error {
 public:
  using Error::Error;
};

}  // namespace mobmech
