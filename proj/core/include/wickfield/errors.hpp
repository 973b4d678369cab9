#pragma once

#include <stdexcept>
#include <string>

namespace wickfield {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, mismatched dimensions, malformed configuration.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A kernel evaluation was requested outside the certified complex strip.
class BudgetError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Cache drift, non-finite results, or a refused series truncation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace wickfield
