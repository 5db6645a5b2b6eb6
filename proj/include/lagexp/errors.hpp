#pragma once

#include <stdexcept>
#include <string>

namespace lagexp {

/// Input outside the domain of an operation (non-transverse planes, area-minimizing
/// ray configurations, nonpositive radii, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InvalidFrame : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A numerical construction could not reach the requested quality.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientData : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NumericalDegeneracy : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepRejected : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Surface density could not be certified to the requested accuracy; carries the
/// estimated error of the far-field plane substitution.
class AccuracyNotMet : public NumericalError {
 public:
  AccuracyNotMet(const std::string& what, double tailBound)
      : NumericalError(what), tailBound_(tailBound) {}
  double tail_bound() const { return tailBound_; }

 private:
  double tailBound_;
};

/// Reading or writing an artifact failed (CLI exit code 3).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lagexp
