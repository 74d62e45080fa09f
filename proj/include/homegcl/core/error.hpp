#pragma once

#include <stdexcept>
#include <string>

namespace homegcl {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data or a violated invariant (CLI exit code 2).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A file could not be opened, read or parsed.
class LoadError : public Error {
 public:
  using Error::Error;
};

// Configuration rejected before any work started.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Numerical failure during training, e.g. a non-finite loss.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace homegcl
