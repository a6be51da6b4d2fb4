#pragma once

#include <stdexcept>
#include <string>

namespace freelab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An enumeration or table would exceed a fixed size cap.
class SizeLimitError : public Error {
 public:
  SizeLimitError(const std::string& what, std::size_t requested, std::size_t cap);
  std::size_t requested() const { return requested_; }
  std::size_t cap() const { return cap_; }

 private:
  std::size_t requested_;
  std::size_t cap_;
};

/// Malformed input: not a partition, mismatched ground sets, wrong chain length.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain (e.g. a real spectral parameter).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Quadrature refinement did not settle within its node budget.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

/// A pair factor q_ab hit its pole.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Failure inside a numerical kernel (eigensolver and the like).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace freelab
