#pragma once

#include <stdexcept>
#include <string>

namespace lrnlm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A dense structure would exceed a configured size cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Input has zero spread (e.g. constant image) where spread is required.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// A numerical precondition on the input (symmetry, finiteness) does not hold.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lrnlm
