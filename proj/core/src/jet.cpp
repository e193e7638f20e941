#include "germlab/jet.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace germlab {

Int MultiIndex::factorial() const {
  Int f = 1;
  for (int a : e_)
    for (int i = 2; i <= a; ++i) f *= i;
  return f;
}

std::string MultiIndex::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < e_.size(); ++i) {
    if (i) os << ',';
    os << e_[i];
  }
  os << ')';
  return os.str();
}

namespace {

void walk_indices(std::size_t pos, int remaining, MultiIndex& cur,
                  std::vector<MultiIndex>& out) {
  if (pos + 1 == cur.size()) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int a = remaining; a >= 0; --a) {
    cur[pos] = a;
    walk_indices(pos + 1, remaining - a, cur, out);
  }
}

}  // namespace

std::vector<MultiIndex> indices_of_degree(std::size_t nu, int degree) {
  std::vector<MultiIndex> out;
  MultiIndex cur(nu);
  walk_indices(0, degree, cur, out);
  return out;
}

std::vector<MultiIndex> all_indices(std::size_t nu, int max_degree, int min_degree) {
  std::vector<MultiIndex> out;
  for (int d = std::max(min_degree, 0); d <= max_degree; ++d) {
    std::vector<MultiIndex> layer = indices_of_degree(nu, d);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

template <class R>
Jet<R>::Jet(int nu, int max_degree, Parity parity)
    : nu_(nu), max_degree_(max_degree), parity_(parity) {
  if (nu < 1) fail(errc::precondition_violated, "jet needs at least one variable");
  if (max_degree < 0) fail(errc::precondition_violated, "negative jet order");
}

template <class R>
void Jet<R>::check_index(const MultiIndex& alpha) const {
  if (static_cast<int>(alpha.size()) != nu_)
    fail(errc::precondition_violated,
         "exponent vector length " + std::to_string(alpha.size()) + " in a jet with " +
             std::to_string(nu_) + " variables");
  for (std::size_t i = 0; i < alpha.size(); ++i)
    if (alpha[i] < 0) fail(errc::precondition_violated, "negative exponent");
  if (alpha.degree() > max_degree_)
    fail(errc::degree_overflow, "monomial degree " + std::to_string(alpha.degree()) +
                                    " exceeds stored order " + std::to_string(max_degree_));
}

template <class R>
R Jet<R>::coeff(const MultiIndex& alpha) const {
  check_index(alpha);
  auto it = c_.find(alpha);
  return it == c_.end() ? R(0) : it->second;
}

template <class R>
void Jet<R>::set_coeff(const MultiIndex& alpha, R value) {
  check_index(alpha);
  if (parity_ == Parity::even && !alpha.even()) {
    if (value == R(0)) return;
    fail(errc::parity_violation, "odd monomial " + alpha.str() + " in an even jet");
  }
  if (value == R(0))
    c_.erase(alpha);
  else
    c_[alpha] = std::move(value);
}

template <class R>
int Jet<R>::order_top() const {
  int top = -1;
  for (const auto& [alpha, c] : c_) top = std::max(top, alpha.degree());
  return top;
}

template <class R>
int Jet<R>::order_bottom() const {
  int bottom = max_degree_ + 1;
  for (const auto& [alpha, c] : c_) bottom = std::min(bottom, alpha.degree());
  return bottom;
}

template <class R>
Jet<R>& Jet<R>::operator+=(const Jet& g) {
  if (nu_ != g.nu_) fail(errc::precondition_violated, "adding jets in different variables");
  if (g.max_degree_ < max_degree_) {
    max_degree_ = g.max_degree_;
    std::erase_if(c_, [&](const auto& kv) { return kv.first.degree() > max_degree_; });
  }
  if (parity_ == Parity::even && g.parity_ != Parity::even) parity_ = Parity::general;
  heuristic_ = heuristic_ || g.heuristic_;
  for (const auto& [alpha, c] : g.c_) {
    if (alpha.degree() > max_degree_) continue;
    set_coeff(alpha, coeff(alpha) + c);
  }
  return *this;
}

template <class R>
Jet<R>& Jet<R>::operator-=(const Jet& g) {
  Jet neg = g;
  neg *= R(-1);
  return (*this) += neg;
}

template <class R>
Jet<R>& Jet<R>::operator*=(const R& s) {
  if (s == R(0)) {
    c_.clear();
    return *this;
  }
  for (auto& [alpha, c] : c_) c *= s;
  return *this;
}

template <class R>
Jet<R> jet_from_coeffs(int nu, int max_degree,
                       const std::vector<std::pair<MultiIndex, R>>& divided_coeffs,
                       Parity parity) {
  Jet<R> f(nu, max_degree, parity);
  for (const auto& [alpha, c] : divided_coeffs) f.set_coeff(alpha, f.coeff(alpha) + c);
  return f;
}

template <class R>
R raw_partial(const Jet<R>& f, const MultiIndex& alpha) {
  R c = f.coeff(alpha);  // degree check happens here
  return c * R(alpha.factorial());
}

template <class R>
Jet<R> truncate(const Jet<R>& f, int new_max_degree) {
  Jet<R> g(f.nu(), std::min(new_max_degree, f.max_degree()), f.parity());
  if (f.heuristic()) g.mark_heuristic();
  for (const auto& [alpha, c] : f.coeffs())
    if (alpha.degree() <= g.max_degree()) g.set_coeff(alpha, c);
  return g;
}

template <class R>
Jet<R> derivative(const Jet<R>& f, std::size_t var) {
  if (var >= static_cast<std::size_t>(f.nu()))
    fail(errc::precondition_violated, "derivative variable out of range");
  if (f.max_degree() == 0) fail(errc::degree_overflow, "derivative of an order-0 jet");
  Jet<R> g(f.nu(), f.max_degree() - 1,
           f.parity() == Parity::even ? Parity::general : f.parity());
  if (f.heuristic()) g.mark_heuristic();
  for (const auto& [alpha, c] : f.coeffs()) {
    if (alpha[var] == 0) continue;
    MultiIndex beta = alpha.plus(var, -1);
    g.set_coeff(beta, c * R(alpha[var]));
  }
  return g;
}

template <class R>
Jet<R> truncated_product(const Jet<R>& f, const Jet<R>& g, int out_degree) {
  if (f.nu() != g.nu()) fail(errc::precondition_violated, "product of jets in different variables");
  Parity parity = (f.parity() == Parity::even && g.parity() == Parity::even)
                      ? Parity::even
                      : Parity::general;
  Jet<R> p(f.nu(), out_degree, parity);
  if (f.heuristic() || g.heuristic()) p.mark_heuristic();
  for (const auto& [a, ca] : f.coeffs()) {
    if (a.degree() > out_degree) continue;
    for (const auto& [b, cb] : g.coeffs()) {
      if (a.degree() + b.degree() > out_degree) continue;
      MultiIndex s = a;
      for (std::size_t i = 0; i < s.size(); ++i) s[i] += b[i];
      p.set_coeff(s, p.coeff(s) + ca * cb);
    }
  }
  return p;
}

namespace {

template <class R>
bool all_odd_monomials(const Jet<R>& f) {
  for (const auto& [alpha, c] : f.coeffs())
    if (alpha.degree() % 2 == 0) return false;
  return true;
}

}  // namespace

template <class R>
Jet<R> compose_poly(const Jet<R>& f, const std::vector<Jet<R>>& subst) {
  if (subst.size() != static_cast<std::size_t>(f.nu()))
    fail(errc::precondition_violated, "substitution list length differs from variable count");
  int nu_new = subst.empty() ? 0 : subst[0].nu();
  bool subst_heuristic = false;
  bool subst_all_odd = true;
  for (const auto& s : subst) {
    if (s.nu() != nu_new)
      fail(errc::precondition_violated, "substitution jets disagree on variable count");
    subst_heuristic = subst_heuristic || s.heuristic();
    subst_all_odd = subst_all_odd && all_odd_monomials(s);
  }
  if (f.parity() == Parity::even && !subst_all_odd)
    fail(errc::oddness_violation, "even jet composed with a non-odd substitution");

  int out_degree = f.max_degree();
  Parity parity = (f.parity() == Parity::even && subst_all_odd) ? Parity::even : Parity::general;
  Jet<R> result(nu_new, out_degree, parity);
  if (f.heuristic() || subst_heuristic) result.mark_heuristic();

  // subst[i]^p, truncated, computed on demand
  std::vector<std::map<int, Jet<R>>> powers(subst.size());
  auto power = [&](std::size_t i, int p) -> const Jet<R>& {
    auto it = powers[i].find(p);
    if (it != powers[i].end()) return it->second;
    Jet<R> value(nu_new, out_degree);
    if (p == 0) {
      value.set_coeff(MultiIndex(static_cast<std::size_t>(nu_new)), R(1));
    } else {
      Jet<R> base = truncate(subst[i], out_degree);
      value = base;
      for (int q = 1; q < p; ++q) value = truncated_product(value, base, out_degree);
    }
    return powers[i].emplace(p, std::move(value)).first->second;
  };

  for (const auto& [alpha, c] : f.coeffs()) {
    Jet<R> term(nu_new, out_degree);
    term.set_coeff(MultiIndex(static_cast<std::size_t>(nu_new)), c);
    for (std::size_t i = 0; i < subst.size(); ++i)
      if (alpha[i] > 0) term = truncated_product(term, power(i, alpha[i]), out_degree);
    // accumulate through a parity-agnostic sum, then filter at the end
    for (const auto& [beta, cb] : term.coeffs()) {
      if (parity == Parity::even && !beta.even()) continue;
      result.set_coeff(beta, result.coeff(beta) + cb);
    }
  }
  return result;
}

template <class R>
std::vector<Jet<R>> linear_substitution(const Matrix<R>& m, int max_degree) {
  std::vector<Jet<R>> subst;
  subst.reserve(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Jet<R> row(static_cast<int>(m.cols()), max_degree);
    for (std::size_t j = 0; j < m.cols(); ++j) {
      MultiIndex e(m.cols());
      e[j] = 1;
      row.set_coeff(e, m(i, j));
    }
    subst.push_back(std::move(row));
  }
  return subst;
}

namespace {

template <class R>
double jet_scale(const Jet<R>& f) {
  double s = 0.0;
  for (const auto& [alpha, c] : f.coeffs())
    s = std::max(s, std::abs(scalar_traits<R>::to_double(c)));
  return s;
}

// Symmetric congruence diagonalization, exact; returns (n_plus, n_minus).
std::pair<int, int> signature_exact(MatQ h) {
  std::size_t n = h.rows();
  int plus = 0, minus = 0;
  std::vector<bool> done(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    // prefer a nonzero diagonal pivot
    std::size_t p = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!done[i] && h(i, i) != 0) {
        p = i;
        break;
      }
    if (p == n) {
      // all remaining diagonal zero; find an off-diagonal entry and fold it in
      std::size_t a = n, b = n;
      for (std::size_t i = 0; i < n && a == n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (!done[i] && !done[j] && h(i, j) != 0) {
            a = i;
            b = j;
            break;
          }
      if (a == n) break;  // remaining block is zero
      // congruence by row/col a += row/col b creates a nonzero diagonal
      for (std::size_t j = 0; j < n; ++j) h(a, j) += h(b, j);
      for (std::size_t i = 0; i < n; ++i) h(i, a) += h(i, b);
      p = a;
    }
    Rat d = h(p, p);
    if (d > 0)
      ++plus;
    else
      ++minus;
    done[p] = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == p || h(i, p) == 0) continue;
      Rat factor = h(i, p) / d;
      for (std::size_t j = 0; j < n; ++j) h(i, j) -= factor * h(p, j);
      for (std::size_t j = 0; j < n; ++j) h(j, i) -= factor * h(j, p);
    }
  }
  return {plus, minus};
}

}  // namespace

template <class R>
HessianAnalysis<R> hessian_analysis(const Jet<R>& f, double tol) {
  int nu = f.nu();
  if (f.max_degree() < 2) fail(errc::insufficient_jet, "order < 2 jet has no Hessian");

  double scale = jet_scale(f);
  for (int i = 0; i < nu; ++i) {
    MultiIndex e(static_cast<std::size_t>(nu));
    e[i] = 1;
    R lin = f.parity() == Parity::even ? R(0) : f.coeff(e);
    if (!scalar_traits<R>::is_zero(lin, scale))
      fail(errc::not_critical, "jet has a nonzero linear part");
  }

  HessianAnalysis<R> out;
  out.tol = tol;
  out.hessian = Matrix<R>(nu, nu);
  for (int i = 0; i < nu; ++i)
    for (int j = i; j < nu; ++j) {
      MultiIndex e(static_cast<std::size_t>(nu));
      e[i] += 1;
      e[j] += 1;
      R raw = f.coeff(e) * (i == j ? R(2) : R(1));
      out.hessian(i, j) = raw;
      out.hessian(j, i) = raw;
    }

  // floating diagnostics (and the floating decision path)
  Eigen::MatrixXd hd(nu, nu);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nu; ++j) hd(i, j) = scalar_traits<R>::to_double(out.hessian(i, j));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hd);
  out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + nu);
  out.eigenvectors = Matrix<double>(nu, nu);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nu; ++j) out.eigenvectors(i, j) = es.eigenvectors()(i, j);

  if constexpr (scalar_traits<R>::exact) {
    Matrix<R> k = kernel_basis(out.hessian);
    out.corank = static_cast<int>(k.cols());
    out.kernel = k;
    auto sig = signature_exact(out.hessian);
    out.n_plus = sig.first;
    out.n_minus = sig.second;

    // complete the kernel basis to an invertible map by greedily appending
    // coordinate vectors
    Matrix<R> m(nu, nu);
    for (std::size_t j = 0; j < k.cols(); ++j)
      for (int i = 0; i < nu; ++i) m(i, j) = k(i, j);
    std::size_t have = k.cols();
    for (int cand = 0; cand < nu && have < static_cast<std::size_t>(nu); ++cand) {
      Matrix<R> trial(nu, have + 1);
      for (std::size_t j = 0; j < have; ++j)
        for (int i = 0; i < nu; ++i) trial(i, j) = m(i, j);
      for (int i = 0; i < nu; ++i) trial(i, have) = (i == cand) ? R(1) : R(0);
      if (rank(trial) == have + 1) {
        for (int i = 0; i < nu; ++i) m(i, have) = (i == cand) ? R(1) : R(0);
        ++have;
      }
    }
    out.aligning_map = m;
  } else {
    double rho = 0.0;
    for (double ev : out.eigenvalues) rho = std::max(rho, std::abs(ev));
    double cut = rho == 0.0 ? 0.0 : tol * rho;
    int corank = 0;
    for (double ev : out.eigenvalues)
      if (std::abs(ev) <= cut || rho == 0.0) ++corank;
    out.corank = corank;
    // order eigenvectors kernel-first
    std::vector<int> order;
    for (int j = 0; j < nu; ++j)
      if (std::abs(out.eigenvalues[j]) <= cut || rho == 0.0) order.push_back(j);
    for (int j = 0; j < nu; ++j)
      if (!(std::abs(out.eigenvalues[j]) <= cut || rho == 0.0)) {
        order.push_back(j);
        if (out.eigenvalues[j] > 0)
          ++out.n_plus;
        else
          ++out.n_minus;
      }
    Matrix<R> m(nu, nu);
    for (int j = 0; j < nu; ++j)
      for (int i = 0; i < nu; ++i) m(i, j) = out.eigenvectors(i, order[j]);
    out.aligning_map = m;
    out.kernel = Matrix<R>(nu, corank);
    for (int j = 0; j < corank; ++j)
      for (int i = 0; i < nu; ++i) out.kernel(i, j) = m(i, j);
  }

  int reg = nu - out.corank;
  Matrix<R> aligned = out.aligning_map.transposed() * out.hessian * out.aligning_map;
  Matrix<R> block(reg, reg);
  for (int i = 0; i < reg; ++i)
    for (int j = 0; j < reg; ++j) block(i, j) = aligned(out.corank + i, out.corank + j);
  out.regular_block_inverse = reg == 0 ? Matrix<R>(0, 0) : inverse(block, 1e-12);
  return out;
}

template <class R>
Jet<R> align_kernel(const Jet<R>& f, const HessianAnalysis<R>& h) {
  return compose_poly(f, linear_substitution(h.aligning_map, f.max_degree()));
}

namespace {

// Weights of the symmetric central stencil on nodes -p..p that is exact for
// the m-th derivative on polynomials of degree <= 2p.
std::vector<double> stencil_weights(int m, int p) {
  int n = 2 * p + 1;
  MatQ v(n, n);
  for (int t = 0; t < n; ++t)
    for (int j = -p; j <= p; ++j) {
      Rat power(1);
      for (int q = 0; q < t; ++q) power *= j;
      v(t, j + p) = power;
    }
  MatQ rhs(n, 1);
  MultiIndex fact({m});
  rhs(m, 0) = Rat(fact.factorial());
  MatQ sol = inverse(v) * rhs;
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = sol(j, 0).convert_to<double>();
  return w;
}

double stencil_apply(const Evaluator& f, const MultiIndex& alpha, double h,
                     std::map<std::vector<int>, double>& memo) {
  std::size_t nu = alpha.size();
  std::vector<std::vector<double>> w(nu);
  std::vector<int> p(nu);
  for (std::size_t i = 0; i < nu; ++i) {
    p[i] = alpha[i] / 2 + 1;
    w[i] = stencil_weights(alpha[i], p[i]);
  }
  std::vector<int> node(nu, 0);
  double sum = 0.0;
  // odometer over the tensor grid
  for (std::size_t i = 0; i < nu; ++i) node[i] = -p[i];
  while (true) {
    double weight = 1.0;
    for (std::size_t i = 0; i < nu; ++i) weight *= w[i][node[i] + p[i]];
    if (weight != 0.0) {
      auto it = memo.find(node);
      double value;
      if (it != memo.end()) {
        value = it->second;
      } else {
        std::vector<double> x(nu);
        for (std::size_t i = 0; i < nu; ++i) x[i] = node[i] * h;
        value = f(x);
        if (!std::isfinite(value)) fail(errc::evaluation_failure, "evaluator returned non-finite value");
        memo.emplace(node, value);
      }
      sum += weight * value;
    }
    std::size_t i = 0;
    while (i < nu && node[i] == p[i]) {
      node[i] = -p[i];
      ++i;
    }
    if (i == nu) break;
    ++node[i];
  }
  return sum / std::pow(h, alpha.degree());
}

}  // namespace

Jet<double> finite_difference_jet(const Evaluator& f, int nu, int max_degree, double step,
                                  Parity parity) {
  if (nu < 1 || max_degree < 0) fail(errc::precondition_violated, "bad finite difference request");
  if (step <= 0.0) fail(errc::precondition_violated, "step must be positive");
  Jet<double> out(nu, max_degree, parity);
  out.mark_heuristic();
  std::map<std::vector<int>, double> memo_h, memo_h2;
  for (const MultiIndex& alpha : all_indices(static_cast<std::size_t>(nu), max_degree)) {
    if (parity == Parity::even && !alpha.even()) continue;
    double coarse = stencil_apply(f, alpha, step, memo_h);
    double fine = stencil_apply(f, alpha, step / 2, memo_h2);
    double raw = (4.0 * fine - coarse) / 3.0;  // kills the h^2 error term
    double divided = raw / Int(alpha.factorial()).convert_to<double>();
    if (divided != 0.0) out.set_coeff(alpha, divided);
  }
  return out;
}

template class Jet<Rat>;
template class Jet<double>;

template Jet<Rat> jet_from_coeffs(int, int, const std::vector<std::pair<MultiIndex, Rat>>&, Parity);
template Jet<double> jet_from_coeffs(int, int, const std::vector<std::pair<MultiIndex, double>>&, Parity);
template Rat raw_partial(const Jet<Rat>&, const MultiIndex&);
template double raw_partial(const Jet<double>&, const MultiIndex&);
template Jet<Rat> truncate(const Jet<Rat>&, int);
template Jet<double> truncate(const Jet<double>&, int);
template Jet<Rat> derivative(const Jet<Rat>&, std::size_t);
template Jet<double> derivative(const Jet<double>&, std::size_t);
template Jet<Rat> truncated_product(const Jet<Rat>&, const Jet<Rat>&, int);
template Jet<double> truncated_product(const Jet<double>&, const Jet<double>&, int);
template Jet<Rat> compose_poly(const Jet<Rat>&, const std::vector<Jet<Rat>>&);
template Jet<double> compose_poly(const Jet<double>&, const std::vector<Jet<double>>&);
template std::vector<Jet<Rat>> linear_substitution(const Matrix<Rat>&, int);
template std::vector<Jet<double>> linear_substitution(const Matrix<double>&, int);
template HessianAnalysis<Rat> hessian_analysis(const Jet<Rat>&, double);
template HessianAnalysis<double> hessian_analysis(const Jet<double>&, double);
template Jet<Rat> align_kernel(const Jet<Rat>&, const HessianAnalysis<Rat>&);
template Jet<double> align_kernel(const Jet<double>&, const HessianAnalysis<double>&);

}  // namespace germlab
