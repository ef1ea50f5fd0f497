#pragma once

#include <stdexcept>
#include <string>

namespace irf {

// Base of every error thrown by the library. Subclasses separate caller
// mistakes (bad input) from numerical breakdowns so the CLI can map them to
// distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a documented precondition or type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class LengthError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class AlignmentError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class RangeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A measure was used where allowability at a given order is required.
class OrderError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class PreconditionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InfeasibleSupportError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Numerical failures.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ModelError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class QuadratureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularSystemError : public NumericalError {
 public:
  SingularSystemError(std::string block, const std::string& what)
      : NumericalError(what), block_(std::move(block)) {}

  // Name of the matrix block that failed to factor ("covariance", "drift",
  // "augmented").
  const std::string& block() const noexcept { return block_; }

 private:
  std::string block_;
};

}  // namespace irf
