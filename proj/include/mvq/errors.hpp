#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mvq {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: bad dimensions, out-of-range probabilities, unreadable input.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// An operation needed more rows than the data provides (e.g. covariance with n < 2).
class InsufficientSamplesError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

/// A column with zero sample standard deviation cannot be standardized.
class DegenerateColumnError : public Error {
 public:
  DegenerateColumnError(const std::string& msg, std::size_t column)
      : Error(msg), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

/// Covariance/correlation matrix is singular or not positive definite.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// CDF integration could not reach the requested tolerance within max_evals.
/// Carries the best estimate and its error bound.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& msg, double estimate, double error_bound)
      : Error(msg), estimate_(estimate), error_bound_(error_bound) {}
  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

/// A requested allocation would exceed the configured memory cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Geometry extraction failed (empty level set, no diagonal crossing, ...).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Nonparametric resampling kept producing degenerate data after the retry budget.
class DegenerateResampleError : public Error {
 public:
  using Error::Error;
};

/// Root finding or another numeric routine failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace mvq
