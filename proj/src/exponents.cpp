#include "semicontrol/exponents.hpp"

#include <sstream>
#include <stdexcept>

namespace semicontrol {

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_string(const Rational& r) {
  std::ostringstream os;
  if (denominator(r) == 1) {
    os << numerator(r);
  } else {
    os << numerator(r) << "/" << denominator(r);
  }
  return os.str();
}

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      const Rational num(text.substr(0, slash));
      const Rational den(text.substr(slash + 1));
      if (den == 0) throw std::invalid_argument("zero denominator");
      return num / den;
    }
    const auto dot = text.find('.');
    if (dot != std::string::npos) {
      const std::string digits = text.substr(0, dot) + text.substr(dot + 1);
      Rational den = 1;
      for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
      return Rational(boost::multiprecision::cpp_int(digits)) / den;
    }
    return Rational(boost::multiprecision::cpp_int(text));
  } catch (const std::exception&) {
    throw std::invalid_argument("parse_rational: cannot parse '" + text + "'");
  }
}

Rational gn_exponent(int n) {
  if (n < 2) throw std::invalid_argument("gn_exponent: requires n >= 2");
  return Rational(2 * (n + 2), n);
}

ExponentReport parabolic_exponent(const Rational& r, int n) {
  ExponentReport rep;
  rep.n = n;
  rep.r = r;
  if (n < 2) {
    rep.message = "requires n >= 2";
    return rep;
  }
  const Rational critical = Rational(n + 2, 2);  // 1 + n/2
  if (r < 2) {
    rep.message = "r below lower bound 2";
    return rep;
  }
  if (r > critical) {
    rep.message = "r above critical exponent 1 + n/2";
    return rep;
  }
  if (r == critical) {
    rep.q_unbounded = true;  // any finite q admissible
    rep.valid = true;
    return rep;
  }
  const Rational q = r * Rational(n + 2) / (Rational(n + 2) - 2 * r);
  // the stated lower bound q >= r(n+2)/n is automatic for r >= 1
  if (q < r * Rational(n + 2, n)) {
    rep.message = "internal: q below the lower bound r(n+2)/n";
    return rep;
  }
  rep.q = q;
  rep.valid = true;
  return rep;
}

BootstrapChain bootstrap_steps(int n) {
  if (n < 3)
    throw std::invalid_argument(
        "bootstrap_steps: requires n >= 3 (the exponent chain has denominator n-2)");
  BootstrapChain out;
  const Rational ratio(n + 2, n - 2);
  const Rational threshold(n + 2, 2);  // 1 + n/2
  Rational e = 2;
  while (true) {
    e *= ratio;
    out.chain.push_back(e);
    ++out.steps;
    if (e > threshold) break;
  }
  return out;
}

ExponentReport elliptic_exponents(const Rational& r, int n) {
  ExponentReport rep;
  rep.n = n;
  rep.r = r;
  if (n < 3) {
    rep.message = "requires n >= 3";
    return rep;
  }
  const Rational r_lo(2 * (n - 1), n);
  const Rational r_hi(n - 1);
  if (r < r_lo) {
    rep.message = "r below lower bound 2(n-1)/n";
    return rep;
  }
  if (r >= r_hi) {
    rep.message = "r must lie in the open upper range r < n-1";
    return rep;
  }

  const Rational excess = Rational(1) / r - Rational(1, n - 1);  // 1/r - 1/(n-1)
  // compatibility (n-1)(1/r - 1/(n-1)) = n(1/s - 2/n), solved for s
  const Rational inv_s = Rational(n - 1, n) * excess + Rational(2, n);
  const Rational s = 1 / inv_s;
  const Rational s_lo(2 * n, n + 2);
  const Rational s_hi(n, 2);
  if (s < s_lo || s >= s_hi) {
    rep.message = "derived s outside [2n/(n+2), n/2)";
    return rep;
  }

  const Rational q = 1 / excess;
  const Rational q_tilde = 1 / (inv_s - Rational(2, n));
  const Rational p = 1 / (Rational(n - 1, n - 2) * excess);
  if (q != p * Rational(n - 1, n - 2) || q_tilde != p * Rational(n, n - 2)) {
    rep.message = "internal: q = p(n-1)/(n-2), q~ = pn/(n-2) identities failed";
    return rep;
  }

  rep.s = s;
  rep.p = p;
  rep.q = q;
  rep.q_tilde = q_tilde;
  rep.valid = true;
  return rep;
}

}  // namespace semicontrol
