#include "semicontrol/nonlinearity.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "semicontrol/errors.hpp"
#include "semicontrol/quadrature.hpp"

namespace semicontrol {

Nonlinearity::Nonlinearity(Kind kind, double c, double lambda)
    : kind_(kind), c_(c), lambda_(lambda) {
  switch (kind_) {
    case Kind::Cubic:
      if (c_ < 0.0) throw std::invalid_argument("cubic: coefficient must be >= 0");
      lambda_f_ = 0.0;
      break;
    case Kind::CubicMinusLinear:
      if (c_ < 0.0 || lambda_ < 0.0)
        throw std::invalid_argument("cubic_minus_linear: coefficients must be >= 0");
      lambda_f_ = lambda_;
      break;
    case Kind::Expm1:
      lambda_f_ = 0.0;
      break;
  }
}

Nonlinearity Nonlinearity::cubic(double c) { return Nonlinearity(Kind::Cubic, c, 0.0); }

Nonlinearity Nonlinearity::cubic_minus_linear(double c, double lambda) {
  return Nonlinearity(Kind::CubicMinusLinear, c, lambda);
}

Nonlinearity Nonlinearity::expm1() { return Nonlinearity(Kind::Expm1, 0.0, 0.0); }

Nonlinearity Nonlinearity::with_weight(SpatialField w) const {
  if (w.values().minCoeff() < 0.0)
    throw ValidationError("Nonlinearity: spatial weight must be >= 0 at every node");
  Nonlinearity out = *this;
  out.weight_ = std::move(w);
  return out;
}

bool Nonlinearity::is_zero() const {
  switch (kind_) {
    case Kind::Cubic: return c_ == 0.0;
    case Kind::CubicMinusLinear: return c_ == 0.0 && lambda_ == 0.0;
    case Kind::Expm1: return false;
  }
  return false;
}

std::string Nonlinearity::name() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Cubic: os << "cubic(" << c_ << ")"; break;
    case Kind::CubicMinusLinear: os << "cubic_minus_linear(" << c_ << "," << lambda_ << ")"; break;
    case Kind::Expm1: os << "expm1"; break;
  }
  if (weight_) os << "*w(x)";
  return os.str();
}

double Nonlinearity::base(double s) const {
  switch (kind_) {
    case Kind::Cubic: return c_ * s * s * s;
    case Kind::CubicMinusLinear: return c_ * s * s * s - lambda_ * s;
    case Kind::Expm1: return std::expm1(s);
  }
  return 0.0;
}

double Nonlinearity::base_derivative(double s) const {
  switch (kind_) {
    case Kind::Cubic: return 3.0 * c_ * s * s;
    case Kind::CubicMinusLinear: return 3.0 * c_ * s * s - lambda_;
    case Kind::Expm1: return std::exp(s);
  }
  return 0.0;
}

double Nonlinearity::eval(long node, double s) const {
  const double w = weight_ ? (*weight_)[node] : 1.0;
  return w * base(s);
}

double Nonlinearity::eval_derivative(long node, double s) const {
  const double w = weight_ ? (*weight_)[node] : 1.0;
  return w * base_derivative(s);
}

double Nonlinearity::eval_truncated(long node, double s, double k) const {
  return eval(node, truncate(s, k));
}

double Nonlinearity::eval_truncated_derivative(long node, double s, double k) const {
  if (std::abs(s) > k) return 0.0;
  return eval_derivative(node, s);
}

NonlinearityReport check_nonlinearity(const std::function<double(double)>& f,
                                      const std::function<double(double)>& fprime,
                                      double lambda_f, double R, int samples) {
  if (!(R > 0.0)) throw std::invalid_argument("check_nonlinearity: R must be positive");
  if (samples < 2) throw std::invalid_argument("check_nonlinearity: need samples >= 2");

  NonlinearityReport rep;
  if (f(0.0) != 0.0) {
    rep.violation = "f(0) != 0";
    rep.witness_s = 0.0;
    return rep;
  }
  const double tol = 1e-12 * (1.0 + std::abs(lambda_f));
  rep.min_derivative = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double s = -R + 2.0 * R * i / (samples - 1);
    const double fp = fprime(s);
    if (fp < rep.min_derivative) rep.min_derivative = fp;
    if (fp < -lambda_f - tol) {
      rep.violation = "f'(s) < -lambda_f";
      rep.witness_s = s;
      return rep;
    }
    if (f(s) * s < -lambda_f * s * s - tol * s * s) {
      rep.violation = "f(s)*s < -lambda_f*s^2";
      rep.witness_s = s;
      return rep;
    }
  }
  rep.passed = true;
  return rep;
}

NonlinearityReport check_nonlinearity(const Nonlinearity& f, double R, int samples) {
  return check_nonlinearity([&](double s) { return f.base(s); },
                            [&](double s) { return f.base_derivative(s); },
                            f.lambda_f(), R, samples);
}

}  // namespace semicontrol
