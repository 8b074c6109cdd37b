#pragma once

#include <stdexcept>
#include <string>

namespace binormal {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on geometry or arguments was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A kernel was evaluated at its pole or a computation produced a
/// non-finite value.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// The requested dimension or configuration is outside what is implemented.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

}  // namespace binormal
