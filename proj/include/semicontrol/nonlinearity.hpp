#pragma once

#include <functional>
#include <optional>
#include <string>

#include "semicontrol/fields.hpp"

namespace semicontrol {

/// Closed catalog of admissible nonlinearities.  Every entry satisfies
/// f(0) = 0 and f'(s) >= -lambda_f with the stored lower-slope constant.
/// The elliptic variant multiplies a catalog entry by a nodal weight
/// w(x) >= 0, giving f(x,s) = w(x) * f_base(s).
class Nonlinearity {
public:
  enum class Kind { Cubic, CubicMinusLinear, Expm1 };

  static Nonlinearity zero() { return cubic(0.0); }
  static Nonlinearity cubic(double c);
  static Nonlinearity cubic_minus_linear(double c, double lambda);
  static Nonlinearity expm1();

  /// Attach a spatial weight (elliptic Caratheodory variant).
  Nonlinearity with_weight(SpatialField w) const;

  Kind kind() const { return kind_; }
  double lambda_f() const { return lambda_f_; }
  bool is_monotone() const { return lambda_f_ == 0.0; }
  bool is_zero() const;
  bool has_weight() const { return weight_.has_value(); }
  const SpatialField& weight() const { return *weight_; }
  std::string name() const;

  /// Base scalar function, ignoring the spatial weight.
  double base(double s) const;
  double base_derivative(double s) const;

  /// Nodal evaluation including the weight (weight = 1 when absent).
  double eval(long node, double s) const;
  double eval_derivative(long node, double s) const;

  /// Truncated variant f_k = f(P_k(.)); the derivative is f'(P_k(s)) inside
  /// the box and 0 outside.
  double eval_truncated(long node, double s, double k) const;
  double eval_truncated_derivative(long node, double s, double k) const;

private:
  Nonlinearity(Kind kind, double c, double lambda);

  Kind kind_;
  double c_ = 0.0;
  double lambda_ = 0.0;
  double lambda_f_ = 0.0;
  std::optional<SpatialField> weight_;
};

struct NonlinearityReport {
  bool passed = false;
  double min_derivative = 0.0;
  double witness_s = 0.0;
  std::string violation;  // empty when passed; names the violated bound
};

/// Samples f on [-R, R]: asserts f(0) = 0 exactly, f'(s) >= -lambda_f - tol,
/// and the sign condition f(s) s >= -lambda_f s^2 used by the energy
/// estimates.
NonlinearityReport check_nonlinearity(const Nonlinearity& f, double R, int samples);

/// Raw-callable variant, used to exercise the failure paths that the closed
/// catalog cannot reach.
NonlinearityReport check_nonlinearity(const std::function<double(double)>& f,
                                      const std::function<double(double)>& fprime,
                                      double lambda_f, double R, int samples);

}  // namespace semicontrol
