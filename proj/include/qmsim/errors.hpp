#pragma once

#include <stdexcept>
#include <string>

namespace qmsim {

/// Input outside the documented domain of an operation (bad angle, N < 2, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computation could not produce a trustworthy result (solver stall,
/// zero-probability Bayes update, non-positive Hessian eigenvalue).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A value left its invariant set, e.g. a Bloch vector outside the unit ball.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace qmsim
