#pragma once

#include <stdexcept>
#include <string>

namespace oedcs {

// Invalid sizes or index ranges supplied by the caller.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation (negative singular
// value, beta outside (0,1], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Input violates a documented contract that cannot be checked by size alone,
// e.g. a basis that is supposed to have orthonormal columns but does not.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Base for failures that arise from the numbers themselves rather than from
// malformed input. The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RankDeficiencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Stage-1 sampling produced too few distinct indices; retry with another seed.
class ResampleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace oedcs
