#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <type_traits>

namespace germlab {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// The two scalar modes. Exact arithmetic is the default; double is used for
// jets sampled from evaluators and for the caustic tracer.
template <class R>
inline constexpr bool is_exact_v = std::is_same_v<R, Rat>;

template <class R>
struct scalar_traits;

template <>
struct scalar_traits<Rat> {
  static constexpr bool exact = true;
  static Rat zero() { return Rat(0); }
  static bool is_zero(const Rat& x, double /*scale*/ = 0.0) { return x == 0; }
  static int sign(const Rat& x) { return x == 0 ? 0 : (x < 0 ? -1 : 1); }
  static double to_double(const Rat& x) { return x.convert_to<double>(); }
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  // Zero tests compare against a scale carried by the caller; bare values
  // smaller than tau count as zero.
  static constexpr double tau = 1e-9;
  static double zero() { return 0.0; }
  static bool is_zero(double x, double scale = 0.0) {
    double s = scale > 0.0 ? scale : 1.0;
    return std::abs(x) <= tau * s;
  }
  static int sign(double x) { return is_zero(x) ? 0 : (x < 0 ? -1 : 1); }
  static double to_double(double x) { return x; }
};

Int gcd(Int a, Int b);

// Exact integer n-th root: largest r with r^n <= x (x >= 0).
Int iroot(const Int& x, unsigned n);

// Exact rational n-th root if one exists.
std::optional<Rat> exact_root(const Rat& x, unsigned n);

inline std::optional<Rat> exact_sqrt(const Rat& x) { return exact_root(x, 2); }

// Nearest rational with small denominator within eps of x, by continued
// fractions. Used to lift floating roots back to candidates that are then
// verified exactly.
std::optional<Rat> rationalize(double x, double eps = 1e-9, std::int64_t max_den = 1000000000000LL);

Rat pow_rat(const Rat& base, int exp);

}  // namespace germlab
