#pragma once

#include <stdexcept>
#include <string>

namespace fourbody {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed to reach its requested accuracy.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double error_estimate = 0.0)
      : std::runtime_error(what), error_estimate_(error_estimate) {}
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

/// Overlap matrix too close to singular for a trustworthy eigenvalue.
class ConditionError : public NumericalError {
 public:
  ConditionError(const std::string& what, double condition)
      : NumericalError(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

/// Raised when the variational solver certifies a bound state for a system
/// the criterion proves unstable. Either the solver or the criterion is wrong.
class InconsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace fourbody
