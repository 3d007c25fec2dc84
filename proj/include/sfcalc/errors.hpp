#pragma once

#include <stdexcept>
#include <string>

namespace sfcalc {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operands that live on different models, empty models, bad block layout.
class StructuralError : public Error {
public:
  using Error::Error;
};

/// Inputs that violate a documented invariant (non-Hermitian, non-unitary, ...).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Argument outside the domain of an operation (u outside [0,1], s <= 1, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// A stated precondition of an engine does not hold.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// The operator model cannot represent the requested quantity (infinite trace).
class ModelError : public Error {
public:
  using Error::Error;
};

/// Failed numerical procedure. Carries whatever partial estimate was available.
class NumericError : public Error {
public:
  NumericError(const std::string& what, double partial = 0.0)
      : Error(what), partial_(partial) {}
  double partial() const noexcept { return partial_; }

private:
  double partial_;
};

}  // namespace sfcalc
