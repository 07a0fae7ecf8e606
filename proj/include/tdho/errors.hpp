#pragma once

#include <stdexcept>
#include <string>

namespace tdho {

/// Evaluation outside the domain of an operation (origin in phase space,
/// evaluation at a discontinuity, non-monotone interval, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid user-supplied parameters.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Step-size underflow or too many steps in the ODE integrator.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t, double h)
      : std::runtime_error(what), t_(t), h_(h) {}
  [[nodiscard]] double t() const noexcept { return t_; }
  [[nodiscard]] double step() const noexcept { return h_; }

 private:
  double t_;
  double h_;
};

/// Adaptive quadrature did not reach the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double value, double achieved)
      : std::runtime_error(what), value_(value), achieved_(achieved) {}
  [[nodiscard]] double value() const noexcept { return value_; }
  [[nodiscard]] double achieved_error() const noexcept { return achieved_; }

 private:
  double value_;
  double achieved_;
};

/// The collocation grid is too coarse for the requested accuracy.
class RefinementRequired : public std::runtime_error {
 public:
  RefinementRequired(const std::string& what, double suggested_spacing)
      : std::runtime_error(what), spacing_(suggested_spacing) {}
  [[nodiscard]] double suggested_spacing() const noexcept { return spacing_; }

 private:
  double spacing_;
};

}  // namespace tdho
