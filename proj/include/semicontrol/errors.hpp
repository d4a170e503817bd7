#pragma once

#include <stdexcept>
#include <string>

namespace semicontrol {

/// Data failed a model assumption (ellipticity, monotonicity, shape, ...).
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A nonlinear or linear solve did not reach its tolerance.
class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, int step, double residual)
      : std::runtime_error(what), step_(step), residual_(residual) {}

  int step() const { return step_; }
  double residual() const { return residual_; }

private:
  int step_ = -1;
  double residual_ = 0.0;
};

}  // namespace semicontrol
