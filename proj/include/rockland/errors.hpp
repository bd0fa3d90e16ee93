#pragma once

#include <stdexcept>
#include <string>

namespace rockland {

/// Operands live in different ambient spaces, or an index is out of range.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Input violates a mathematical hypothesis needed by the requested construction.
struct HypothesisError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Evaluation requested at a point outside the domain (a pole, a support boundary).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A construction produced an object failing one of its own exact checks.
struct ConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A numerical procedure did not reach its tolerance.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rockland
