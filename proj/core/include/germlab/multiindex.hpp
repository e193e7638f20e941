#pragma once

#include "germlab/rational.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

namespace germlab {

// Exponent vector of a monomial k1^a1 ... knu^anu. Length equals the variable
// count of the jet it belongs to; entries are small non-negative integers.
class MultiIndex {
public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t nu) : e_(nu, 0) {}
  MultiIndex(std::initializer_list<int> e) : e_(e) {}
  explicit MultiIndex(std::vector<int> e) : e_(std::move(e)) {}

  std::size_t size() const { return e_.size(); }
  int operator[](std::size_t i) const { return e_[i]; }
  int& operator[](std::size_t i) { return e_[i]; }
  const std::vector<int>& exponents() const { return e_; }

  int degree() const {
    int d = 0;
    for (int a : e_) d += a;
    return d;
  }

  bool even() const {
    return degree() % 2 == 0;
  }

  // alpha! as an exact integer; raw partials are alpha! times divided coefficients.
  Int factorial() const;

  MultiIndex plus(std::size_t var, int amount = 1) const {
    MultiIndex r = *this;
    r.e_[var] += amount;
    return r;
  }

  auto operator<=>(const MultiIndex&) const = default;

  std::string str() const;

private:
  std::vector<int> e_;
};

// All exponent vectors with degree in [min_degree, max_degree], graded
// lexicographic, ascending degree. The workhorse of every jet loop.
std::vector<MultiIndex> all_indices(std::size_t nu, int max_degree, int min_degree = 0);

// Monomials of exactly the given degree.
std::vector<MultiIndex> indices_of_degree(std::size_t nu, int degree);

}  // namespace germlab
