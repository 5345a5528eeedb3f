#pragma once

#include <stdexcept>
#include <string>

namespace mefm {

/// Base of all library errors. The CLI maps each subclass to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments: ranks out of range, unknown preset names, invalid knobs.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (dimension mismatch, incomplete grid).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not produce a meaningful answer.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace mefm
