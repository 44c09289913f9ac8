#pragma once

#include <stdexcept>
#include <string>

namespace coupon {

// Base class for every error raised by the library. The CLI maps the
// concrete subclasses onto its exit-code contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function (e.g. W0 below -1/e).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent integer arguments (l > m, n > N, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A computation would exceed a configured size or memory cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// A Stirling backend was queried outside the region it is valid on.
class BackendWindowError : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature did not reach its tolerance.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

// Rejection sampling ran out of attempts.
class AttemptsExhaustedError : public Error {
 public:
  using Error::Error;
};

// An internal self-check failed: indicates a numerical bug, not bad input.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// Path/sequence has the wrong length or shape.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// File could not be read or written, or has a bad format.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace coupon
