#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>
#include <vector>

namespace semicontrol {

/// Exact rational arithmetic for the regularity-exponent formulas.
using Rational = boost::multiprecision::cpp_rational;

double to_double(const Rational& r);
std::string to_string(const Rational& r);
/// Parses "p", "p/q" or a plain decimal like "2.5".
Rational parse_rational(const std::string& text);

/// Gagliardo-Nirenberg embedding exponent p = 2(n+2)/n for
/// L^2(H^1) cap L^inf(L^2) -> L^p(Q).  Requires n >= 2.
Rational gn_exponent(int n);

struct ExponentReport {
  int n = 0;
  Rational r;
  bool valid = false;
  std::string message;  // names the violated bound when invalid

  // parabolic outputs
  std::optional<Rational> q;
  bool q_unbounded = false;  // critical case: any finite q admissible

  // elliptic outputs
  std::optional<Rational> s;
  std::optional<Rational> p;
  std::optional<Rational> q_tilde;
};

/// State integrability for u in L^r(Q), r in [2, 1+n/2]:
/// q = r(n+2)/(n+2-2r) below the critical exponent, arbitrary finite q at it.
ExponentReport parabolic_exponent(const Rational& r, int n);

struct BootstrapChain {
  int steps = 0;
  std::vector<Rational> chain;  // e_j = 2 ((n+2)/(n-2))^j up to the first
                                // exponent above 1 + n/2
};

/// Number of integrability-improvement passes needed to reach the
/// L^infinity threshold 1 + n/2; requires n >= 3.
BootstrapChain bootstrap_steps(int n);

/// Neumann trace/interior exponents: solves the compatibility relation
/// (n-1)(1/r - 1/(n-1)) = n(1/s - 2/n) for s and returns
/// 1/q = 1/r - 1/(n-1), 1/q~ = 1/s - 2/n, 1/p = (n-1)/(n-2) (1/r - 1/(n-1)).
/// Requires n >= 3 and r in [2(n-1)/n, n-1); also verifies the identities
/// q = p(n-1)/(n-2) and q~ = p n/(n-2) exactly.
ExponentReport elliptic_exponents(const Rational& r, int n);

}  // namespace semicontrol
