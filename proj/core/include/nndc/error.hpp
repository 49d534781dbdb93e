#pragma once

#include <stdexcept>
#include <string>

namespace nndc {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument violates an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input data is malformed or unusable (bad file, query colliding with a
/// database point, ...). File errors carry the offending position in the
/// message.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A numeric routine failed (no convergence, inconsistent moments, singular
/// matrix).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace nndc
