#pragma once

#include <stdexcept>
#include <string>

namespace hypoflow {

/// Invalid arguments or preconditions (bad dimension, degree, axis, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed (singular pivot, non-convergence, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Initial data violates a conservation/admissibility condition.
class AdmissibilityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A Lyapunov/energy functional left its equivalence band with the L2 or H1 norm.
class GuardViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Run configuration could not be parsed or validated.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hypoflow
