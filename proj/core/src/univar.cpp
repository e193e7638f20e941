#include "univar.hpp"

#include "germlab/errors.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace germlab {

using Big = boost::multiprecision::cpp_bin_float_50;

Int gcd(Int a, Int b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Int iroot(const Int& x, unsigned n) {
  if (x < 0) fail(errc::precondition_violated, "integer root of a negative number");
  if (x == 0 || x == 1 || n == 1) return x;
  Int lo = 0, hi = Int(1) << (static_cast<unsigned>(boost::multiprecision::msb(x)) / n + 1);
  while (lo < hi) {
    Int mid = (lo + hi + 1) / 2;
    Int p = 1;
    for (unsigned i = 0; i < n; ++i) p *= mid;
    if (p <= x)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

std::optional<Rat> exact_root(const Rat& x, unsigned n) {
  if (n == 0) fail(errc::precondition_violated, "zeroth root");
  int sign = x == 0 ? 0 : (x < 0 ? -1 : 1);
  if (sign == 0) return Rat(0);
  if (sign < 0 && n % 2 == 0) return std::nullopt;
  Int num = boost::multiprecision::numerator(x);
  Int den = boost::multiprecision::denominator(x);
  if (num < 0) num = -num;
  Int rn = iroot(num, n), rd = iroot(den, n);
  Int pn = 1, pd = 1;
  for (unsigned i = 0; i < n; ++i) {
    pn *= rn;
    pd *= rd;
  }
  if (pn != num || pd != den) return std::nullopt;
  Rat r(rn, rd);
  return sign < 0 ? Rat(-r) : r;
}

std::optional<Rat> rationalize(double x, double eps, std::int64_t max_den) {
  if (!std::isfinite(x)) return std::nullopt;
  // continued fraction convergents of x
  double target = x;
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double frac = x;
  for (int iter = 0; iter < 64; ++iter) {
    double fl = std::floor(frac);
    if (fl > 9.2e18 || fl < -9.2e18) break;
    std::int64_t a = static_cast<std::int64_t>(fl);
    std::int64_t p2, q2;
    if (__builtin_mul_overflow(a, p1, &p2) || __builtin_add_overflow(p2, p0, &p2)) break;
    if (__builtin_mul_overflow(a, q1, &q2) || __builtin_add_overflow(q2, q0, &q2)) break;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double value = static_cast<double>(p1) / static_cast<double>(q1);
    if (std::abs(value - target) <= eps * std::max(1.0, std::abs(target)))
      return Rat(Int(p1), Int(q1));
    double rem = frac - fl;
    if (rem < 1e-18) break;
    frac = 1.0 / rem;
  }
  return std::nullopt;
}

Rat pow_rat(const Rat& base, int exp) {
  if (exp == 0) return Rat(1);
  Rat b = exp < 0 ? Rat(1) / base : base;
  int e = exp < 0 ? -exp : exp;
  Rat r(1);
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

}  // namespace germlab

namespace germlab::uni {

Poly trim(Poly p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}

int degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

Rat eval(const Poly& p, const Rat& x) {
  Rat v(0);
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
  return v;
}

double eval_d(const Poly& p, double x) {
  double v = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + it->convert_to<double>();
  return v;
}

Poly derivative(const Poly& p) {
  Poly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * Rat(static_cast<int>(i)));
  return trim(std::move(d));
}

Poly add(const Poly& p, const Poly& q) {
  Poly r = p;
  if (q.size() > r.size()) r.resize(q.size(), Rat(0));
  for (std::size_t i = 0; i < q.size(); ++i) r[i] += q[i];
  return trim(std::move(r));
}

Poly scale(const Poly& p, const Rat& s) {
  if (s == 0) return {};
  Poly r = p;
  for (Rat& c : r) c *= s;
  return r;
}

Poly mul(const Poly& p, const Poly& q) {
  if (p.empty() || q.empty()) return {};
  Poly r(p.size() + q.size() - 1, Rat(0));
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return trim(std::move(r));
}

std::pair<Poly, Poly> divmod(const Poly& p, const Poly& q) {
  if (q.empty()) fail(errc::precondition_violated, "polynomial division by zero");
  Poly rem = p, quot;
  int dq = degree(q);
  if (degree(p) >= dq) quot.assign(p.size() - q.size() + 1, Rat(0));
  while (degree(rem) >= dq) {
    int shift = degree(rem) - dq;
    Rat c = rem.back() / q.back();
    quot[shift] = c;
    for (int i = 0; i <= dq; ++i) rem[shift + i] -= c * q[i];
    rem = trim(std::move(rem));
  }
  return {trim(std::move(quot)), rem};
}

Poly gcd(Poly p, Poly q) {
  p = trim(std::move(p));
  q = trim(std::move(q));
  while (!q.empty()) {
    Poly r = divmod(p, q).second;
    p = std::move(q);
    q = std::move(r);
  }
  if (!p.empty() && p.back() != 1) {
    Rat lead = p.back();
    for (Rat& c : p) c /= lead;
  }
  return p;
}

Poly squarefree_part(const Poly& p) {
  if (degree(p) < 1) return p;
  Poly g = gcd(p, derivative(p));
  return divmod(p, g).first;
}

std::vector<double> real_roots(const Poly& p_in) {
  Poly p = squarefree_part(trim(p_in));
  int n = degree(p);
  std::vector<double> roots;
  if (n < 1) return roots;
  if (n == 1) {
    roots.push_back((-p[0] / p[1]).convert_to<double>());
    return roots;
  }
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) companion(i, n - 1) = (-p[i] / p[n]).convert_to<double>();
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion);

  double scale = 0.0;
  for (const Rat& c : p) scale = std::max(scale, std::abs(c.convert_to<double>()));
  std::vector<Big> pb(n + 1);
  for (int k = 0; k <= n; ++k)
    pb[k] = Big(boost::multiprecision::numerator(p[k])) /
            Big(boost::multiprecision::denominator(p[k]));
  for (int i = 0; i < n; ++i) {
    std::complex<double> z = es.eigenvalues()(i);
    double magnitude = std::max(1.0, std::abs(z));
    if (std::abs(z.imag()) > 1e-8 * magnitude) continue;
    // polish with high precision Newton
    Big x(z.real());
    for (int iter = 0; iter < 60; ++iter) {
      Big value(0), slope(0);
      for (int k = n; k >= 0; --k) {
        slope = slope * x + value;
        value = value * x + pb[k];
      }
      if (slope == 0) break;
      Big nx = x - value / slope;
      if (abs(nx - x) <= Big(1e-45) * (abs(nx) + 1)) {
        x = nx;
        break;
      }
      x = nx;
    }
    double r = x.convert_to<double>();
    bool duplicate = false;
    for (double seen : roots)
      if (std::abs(seen - r) <= 1e-9 * std::max(1.0, std::abs(seen))) duplicate = true;
    if (!duplicate && std::abs(eval_d(p, r)) <= 1e-6 * std::max(1.0, scale)) roots.push_back(r);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::optional<Rat> rational_root_near(const Poly& p, double x) {
  for (double eps : {1e-12, 1e-9, 1e-6}) {
    std::optional<Rat> cand = rationalize(x, eps);
    if (cand && eval(p, *cand) == 0) return cand;
  }
  return std::nullopt;
}

std::vector<Rat> rational_roots(const Poly& p_in) {
  Poly p = trim(p_in);
  std::vector<Rat> out;
  if (degree(p) < 1) return out;
  if (p[0] == 0) {
    out.push_back(Rat(0));
    Poly q(p.begin() + 1, p.end());
    for (const Rat& r : rational_roots(q))
      if (r != 0) out.push_back(r);
    std::sort(out.begin(), out.end());
    return out;
  }
  for (double r : real_roots(p)) {
    std::optional<Rat> q = rational_root_near(p, r);
    if (q && std::find(out.begin(), out.end(), *q) == out.end()) out.push_back(*q);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace germlab::uni
