#pragma once

// Internal helpers: exact univariate polynomials over Q, root finding, and a
// tiny quadratic field extension. Not installed.

#include "germlab/rational.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace germlab::uni {

// Ascending coefficients, trailing zeros stripped; {} is the zero polynomial.
using Poly = std::vector<Rat>;

Poly trim(Poly p);
int degree(const Poly& p);  // -1 for zero
Rat eval(const Poly& p, const Rat& x);
double eval_d(const Poly& p, double x);
Poly derivative(const Poly& p);
Poly add(const Poly& p, const Poly& q);
Poly scale(const Poly& p, const Rat& s);
Poly mul(const Poly& p, const Poly& q);
std::pair<Poly, Poly> divmod(const Poly& p, const Poly& q);
Poly gcd(Poly p, Poly q);  // monic
Poly squarefree_part(const Poly& p);

// Distinct real roots, numerically (companion matrix, then Newton polish).
std::vector<double> real_roots(const Poly& p);

// Distinct rational roots, proven by exact evaluation.
std::vector<Rat> rational_roots(const Poly& p);

// Root of p nearest x as an exact rational if one verifies, via continued
// fraction candidates.
std::optional<Rat> rational_root_near(const Poly& p, double x);

// a + b*sqrt(d), d a fixed non-square rational (d = -1 gives Q(i)).
struct QuadExt {
  Rat a, b, d;

  QuadExt(Rat a_, Rat b_, Rat d_) : a(std::move(a_)), b(std::move(b_)), d(std::move(d_)) {}
  static QuadExt make(const Rat& a, const Rat& d) { return QuadExt(a, Rat(0), d); }

  QuadExt conj() const { return QuadExt(a, -b, d); }
  Rat norm() const { return a * a - d * b * b; }
  bool is_zero() const { return a == 0 && b == 0; }

  friend QuadExt operator+(const QuadExt& x, const QuadExt& y) {
    return QuadExt(x.a + y.a, x.b + y.b, x.d);
  }
  friend QuadExt operator-(const QuadExt& x, const QuadExt& y) {
    return QuadExt(x.a - y.a, x.b - y.b, x.d);
  }
  friend QuadExt operator*(const QuadExt& x, const QuadExt& y) {
    return QuadExt(x.a * y.a + x.d * x.b * y.b, x.a * y.b + x.b * y.a, x.d);
  }
  friend QuadExt operator/(const QuadExt& x, const QuadExt& y) {
    Rat n = y.norm();
    QuadExt num = x * y.conj();
    return QuadExt(num.a / n, num.b / n, x.d);
  }
};

}  // namespace germlab::uni
