#pragma once

#include <stdexcept>
#include <string>

namespace gfkchain {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (bad range, bad shape).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical precondition failed (non-symmetric input, indefinite matrix, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Not enough samples to estimate the requested statistics.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// The data cannot support the requested construction (rank-deficient
/// subspace, single-class training set).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace gfkchain
