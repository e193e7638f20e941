#pragma once

#include "germlab/errors.hpp"
#include "germlab/matrix.hpp"
#include "germlab/multiindex.hpp"
#include "germlab/rational.hpp"

#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace germlab {

enum class Parity { general, even };

// Truncated Taylor expansion of a germ at the origin in nu variables, stored
// as divided coefficients: coeff(alpha) = (d^alpha f)(0) / alpha!.
//
// Invariants, enforced on construction and by every operation:
//   - stored exponent vectors have length nu and degree <= max_degree;
//   - zero coefficients are never stored;
//   - parity == even implies every stored monomial has even degree.
// Querying beyond max_degree is an error, never a silent zero: the data
// simply is not there.
template <class R>
class Jet {
public:
  Jet(int nu, int max_degree, Parity parity = Parity::general);

  int nu() const { return nu_; }
  int max_degree() const { return max_degree_; }
  Parity parity() const { return parity_; }

  // True when the coefficients came from sampled evaluations rather than
  // exact data; propagated through all operations.
  bool heuristic() const { return heuristic_; }
  void mark_heuristic() { heuristic_ = true; }

  const std::map<MultiIndex, R>& coeffs() const { return c_; }

  R coeff(const MultiIndex& alpha) const;
  void set_coeff(const MultiIndex& alpha, R value);

  bool is_zero() const { return c_.empty(); }

  // Largest stored monomial degree, -1 when zero.
  int order_top() const;
  // Smallest stored monomial degree, max_degree + 1 when zero.
  int order_bottom() const;

  Jet& operator+=(const Jet& g);
  Jet& operator-=(const Jet& g);
  Jet& operator*=(const R& s);

  friend Jet operator+(Jet f, const Jet& g) { return f += g; }
  friend Jet operator-(Jet f, const Jet& g) { return f -= g; }
  friend Jet operator*(const R& s, Jet f) { return f *= s; }

  bool operator==(const Jet&) const = default;

private:
  int nu_;
  int max_degree_;
  Parity parity_;
  bool heuristic_ = false;
  std::map<MultiIndex, R> c_;

  void check_index(const MultiIndex& alpha) const;
};

using JetQ = Jet<Rat>;
using JetD = Jet<double>;

template <class R>
Jet<R> jet_from_coeffs(int nu, int max_degree,
                       const std::vector<std::pair<MultiIndex, R>>& divided_coeffs,
                       Parity parity = Parity::general);

// alpha! * coeff(alpha). Throws degree_overflow past the stored order.
template <class R>
R raw_partial(const Jet<R>& f, const MultiIndex& alpha);

template <class R>
Jet<R> truncate(const Jet<R>& f, int new_max_degree);

// d f / d k_var as a jet of order max_degree - 1.
template <class R>
Jet<R> derivative(const Jet<R>& f, std::size_t var);

// Product truncated at out_degree.
template <class R>
Jet<R> truncated_product(const Jet<R>& f, const Jet<R>& g, int out_degree);

// f(subst[0], ..., subst[nu-1]) truncated at f.max_degree(). The substitution
// jets are read as exact polynomials; they must share one variable count and
// may change it. Substituting non-odd polynomials into an even jet is refused.
template <class R>
Jet<R> compose_poly(const Jet<R>& f, const std::vector<Jet<R>>& subst);

// Substitution jets for the linear change k_old = M * k_new; M is nu_old rows
// by nu_new columns.
template <class R>
std::vector<Jet<R>> linear_substitution(const Matrix<R>& m, int max_degree);

template <class R>
struct HessianAnalysis {
  Matrix<R> hessian;                 // raw second partials at 0
  int corank = 0;
  Matrix<R> kernel;                  // nu x corank, kernel basis columns
  Matrix<R> aligning_map;            // invertible; first corank columns span the kernel
  Matrix<R> regular_block_inverse;   // inverse of the aligned non-degenerate block
  int n_plus = 0, n_minus = 0;       // signature of the Hessian
  std::vector<double> eigenvalues;   // floating diagnostics, ascending
  Matrix<double> eigenvectors;       // columns match eigenvalues
  double tol = 0.0;
};

// Rank analysis of the Hessian. Exact scalars use rational elimination, so
// corank and kernel are exact and tol only feeds the diagnostic eigenpairs;
// double jets compare eigenvalues against tol times the spectral radius.
// Requires a critical jet: a nonzero linear part throws not_critical.
template <class R>
HessianAnalysis<R> hessian_analysis(const Jet<R>& f, double tol = 1e-8);

// Rewrites f in coordinates where the Hessian kernel is spanned by the first
// corank variables and the remaining block is non-degenerate.
template <class R>
Jet<R> align_kernel(const Jet<R>& f, const HessianAnalysis<R>& h);

using Evaluator = std::function<double(const std::vector<double>&)>;

// Jet of an evaluator at the origin by central differences with one step of
// Richardson refinement. The result is marked heuristic; expect about four
// orders of accuracy in step.
Jet<double> finite_difference_jet(const Evaluator& f, int nu, int max_degree,
                                  double step = 1e-2, Parity parity = Parity::general);

extern template class Jet<Rat>;
extern template class Jet<double>;

}  // namespace germlab
