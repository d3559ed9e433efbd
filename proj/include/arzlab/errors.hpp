#pragma once

#include <stdexcept>
#include <string>

namespace arzlab {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Operating point violates a regime assumption (e.g. free-flow density
/// handed to a controller designed for congestion).
class RegimeError : public std::runtime_error {
 public:
  explicit RegimeError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A model-level failure: no root bracketed, ill-posed fit, mismatched model.
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical blow-up during time integration; carries the simulation time
/// at which the state became invalid.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& msg, double t)
      : std::runtime_error(msg + " (t=" + std::to_string(t) + " s)"), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// File-format or filesystem failure.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace arzlab
