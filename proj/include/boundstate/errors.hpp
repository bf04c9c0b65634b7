#pragma once

#include <stdexcept>
#include <string>

namespace boundstate {

// Base of everything the library throws. Callers that only care about
// "the computation could not proceed" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid (n, p, alpha) or controls; the CLI maps this to exit code 1.
class ParameterError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class SingularInput : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

// Event ordering broke; usually means the integration tolerance is too loose.
class InterlacingViolation : public Error {
 public:
  using Error::Error;
};

class AmbiguousEvent : public Error {
 public:
  using Error::Error;
};

class IndeterminateCount : public Error {
 public:
  using Error::Error;
};

class MissingEvents : public Error {
 public:
  using Error::Error;
};

class ProbeUndefined : public Error {
 public:
  using Error::Error;
};

class MonotonicityViolation : public Error {
 public:
  using Error::Error;
};

class BracketNotFound : public Error {
 public:
  using Error::Error;
};

// Unreadable input or unwritable output; exit code 3 in the CLI.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace boundstate
