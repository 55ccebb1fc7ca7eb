#pragma once

#include <stdexcept>
#include <string>

namespace lcb {

// Evaluation at a point where the potential is not differentiable.
class NonSmoothPointError : public std::domain_error {
 public:
  explicit NonSmoothPointError(const std::string& what) : std::domain_error(what) {}
};

// Argument lies outside the potential's domain.
class DomainViolation : public std::domain_error {
 public:
  explicit DomainViolation(const std::string& what) : std::domain_error(what) {}
};

// The model does not provide the oracle an operation needs.
class UnsupportedOperation : public std::runtime_error {
 public:
  explicit UnsupportedOperation(const std::string& what) : std::runtime_error(what) {}
};

// An inner iterative solve ran out of budget; carries the last residual.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Configuration file problems: parse errors, unknown names, missing fields.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lcb
