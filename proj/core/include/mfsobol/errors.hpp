#pragma once

#include <stdexcept>
#include <string>

namespace mfsobol {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A pooled sample has zero (or negative) empirical variance, so the
// pick-freeze statistic is undefined.
class DegenerateSample : public Error {
 public:
  using Error::Error;
};

// Paired arrays do not have equal lengths.
class LengthMismatch : public Error {
 public:
  using Error::Error;
};

// A sample violates a structural requirement other than length
// (fewer than two rows, non-finite entries, one-sided coarse arrays).
class InvalidSample : public Error {
 public:
  using Error::Error;
};

// A coarse-model operation was requested on a sample without coarse arrays.
class MissingCoarse : public Error {
 public:
  using Error::Error;
};

// A scalar argument is outside its mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Model parameters violate their declared constraints.
class InvalidParams : public Error {
 public:
  using Error::Error;
};

// An evaluation point lies outside the model's declared input support.
class OutOfSupport : public Error {
 public:
  using Error::Error;
};

// The requested operation is not available for this model.
class Unsupported : public Error {
 public:
  using Error::Error;
};

}  // namespace mfsobol
