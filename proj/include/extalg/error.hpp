#ifndef EXTALG_ERROR_HPP
#define EXTALG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace extalg {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An object could not be built because one of its invariants fails
/// (asymmetric or singular metric, malformed table input, ...).
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// A caller passed arguments outside the operation's domain.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Operands live in algebras of different dimension.
class DimensionError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// A numeric procedure did not converge or produced a non-finite value.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// An internal consistency check failed on otherwise valid input.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// A precondition that depends on data (not on argument shape) is violated.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace extalg

#endif  // EXTALG_ERROR_HPP
