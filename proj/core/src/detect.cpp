#include "germlab/detect.hpp"

#include "germlab/errors.hpp"

#include "convert.hpp"
#include "univar.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace germlab {
namespace {

template <class R>
int sgn(const R& v) {
  return scalar_traits<R>::sign(v);
}

template <class R>
bool zeroish(const R& v, double scale) {
  return scalar_traits<R>::is_zero(v, scale);
}

template <class R>
Jet<R> apply_map(const Jet<R>& f, const Matrix<R>& m) {
  return compose_poly(f, linear_substitution(m, f.max_degree()));
}

// k_var += lambda * k_other^power, identity on everything else.
template <class R>
Jet<R> shear_var(const Jet<R>& f, std::size_t var, std::size_t other, const R& lambda,
                 int power) {
  const int nu = f.nu();
  std::vector<Jet<R>> subst;
  subst.reserve(nu);
  for (int i = 0; i < nu; ++i) {
    Jet<R> s(nu, f.max_degree());
    MultiIndex e(static_cast<std::size_t>(nu));
    e[i] = 1;
    s.set_coeff(e, R(1));
    if (static_cast<std::size_t>(i) == var) {
      MultiIndex p(static_cast<std::size_t>(nu));
      p[other] = power;
      s.set_coeff(p, lambda);
    }
    subst.push_back(std::move(s));
  }
  return compose_poly(f, subst);
}

// Copy with the stated stored order, dropping overflow or admitting headroom.
template <class R>
Jet<R> fit_degree(const Jet<R>& f, int deg) {
  if (f.max_degree() == deg) return f;
  Jet<R> out(f.nu(), deg, f.parity());
  for (const auto& [alpha, v] : f.coeffs())
    if (alpha.degree() <= deg) out.set_coeff(alpha, v);
  if (f.heuristic()) out.mark_heuristic();
  return out;
}

template <class R>
std::vector<Jet<R>> identity_substitution(int nu, int max_degree) {
  std::vector<Jet<R>> subst;
  subst.reserve(nu);
  for (int i = 0; i < nu; ++i) {
    Jet<R> s(nu, max_degree);
    MultiIndex e(static_cast<std::size_t>(nu));
    e[i] = 1;
    s.set_coeff(e, R(1));
    subst.push_back(std::move(s));
  }
  return subst;
}

// Checks that f is critical and kernel-aligned in its first c variables and
// returns the inverse of the regular Hessian block (empty when c == nu).
template <class R>
Matrix<R> kernel_block_inverse_checked(const Jet<R>& f, int c) {
  const int nu = f.nu();
  if (c < 0 || c > nu) fail(errc::precondition_violated, "corank out of range");
  if (f.max_degree() < 2) fail(errc::insufficient_jet, "alignment checks need the 2-jet");
  const double fscale = conv::jet_scale(f);
  if (f.parity() != Parity::even) {
    for (const auto& e : indices_of_degree(nu, 1))
      if (!zeroish(f.coeff(e), fscale)) fail(errc::not_critical, "linear part does not vanish");
  }
  Matrix<R> h(nu, nu);
  double hscale = 1.0;
  for (int i = 0; i < nu; ++i)
    for (int j = i; j < nu; ++j) {
      MultiIndex e(static_cast<std::size_t>(nu));
      e[i] += 1;
      e[j] += 1;
      R v = raw_partial(f, e);
      h(i, j) = v;
      h(j, i) = v;
      hscale = std::max(hscale, std::abs(conv::to_d(v)));
    }
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nu; ++j)
      if ((i < c || j < c) && !zeroish(h(i, j), hscale))
        fail(errc::precondition_violated, "Hessian kernel variables must come first");
  const int m = nu - c;
  if (m == 0) return Matrix<R>();
  Matrix<R> reg(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) reg(i, j) = h(c + i, c + j);
  return inverse(reg);
}

// Z(k) with grad_z f(k, Z(k)) = 0 to the stored order, by damped-free Newton
// sweeps that gain at least one degree per round.
template <class R>
std::vector<Jet<R>> solve_stationary(const Jet<R>& f, int c, const Matrix<R>& reg_inv) {
  const int nu = f.nu();
  const int m = nu - c;
  const int N = f.max_degree();
  const int zdeg = std::max(2, N - 1);
  std::vector<Jet<R>> grads;
  grads.reserve(m);
  for (int i = 0; i < m; ++i) grads.push_back(derivative(f, c + i));
  std::vector<Jet<R>> subst = identity_substitution<R>(c, zdeg);
  const std::size_t zbase = subst.size();
  for (int i = 0; i < m; ++i) subst.emplace_back(c, zdeg);
  for (int sweep = 0; sweep <= N + 1; ++sweep) {
    std::vector<Jet<R>> g;
    g.reserve(m);
    for (int j = 0; j < m; ++j)
      g.push_back(fit_degree(compose_poly(grads[j], subst), zdeg));
    bool changed = false;
    for (int i = 0; i < m; ++i) {
      Jet<R> zi = subst[zbase + i];
      for (int j = 0; j < m; ++j) {
        if (reg_inv(i, j) == R(0)) continue;
        Jet<R> t = g[j];
        t *= reg_inv(i, j);
        zi -= t;
      }
      if (!(zi == subst[zbase + i])) {
        changed = true;
        subst[zbase + i] = std::move(zi);
      }
    }
    if (!changed) break;
  }
  return std::vector<Jet<R>>(subst.begin() + zbase, subst.end());
}

// psi(k) = f(k, Z(k)): the reduced germ in the kernel variables alone.
template <class R>
Jet<R> reduce_aligned(const Jet<R>& f, int c) {
  Matrix<R> reg_inv = kernel_block_inverse_checked(f, c);
  if (f.nu() == c) return f;
  std::vector<Jet<R>> subst = identity_substitution<R>(c, std::max(2, f.max_degree() - 1));
  std::vector<Jet<R>> z = solve_stationary(f, c, reg_inv);
  subst.insert(subst.end(), z.begin(), z.end());
  return compose_poly(f, subst);
}

template <class R>
R delta3_form(const std::array<R, 4>& c) {
  const R &A = c[0], &B = c[1], &C = c[2], &D = c[3];
  return R(4) * (B * B * B * D + A * C * C * C) + R(27) * A * A * D * D - B * B * C * C -
         R(18) * A * B * C * D;
}

using uni::Poly;

// W(k, 1) for a binary form with divided coefficients w[i] on x^(d-i) y^i.
Rat form_at(const std::vector<Rat>& w, const Rat& k) {
  Rat v(0);
  for (const Rat& wi : w) v = v * k + wi;
  return v;
}

// Small integer k with W(k, 1) != 0, so the frame below keeps every root
// direction at finite parameter.
Rat pick_offset(const std::vector<Rat>& w) {
  for (int k : {0, 1, -1, 2, -2, 3, -3, 4, -4}) {
    if (form_at(w, Rat(k)) != 0) return Rat(k);
  }
  fail(errc::zero_form, "form vanishes in every probe direction");
}

// p(t) = W(1 + k t, t); degree equals deg W exactly by the choice of k, and
// root t corresponds to the root direction (1 + k t, t).
Poly t_line(const std::vector<Rat>& w, const Rat& k) {
  const int d = static_cast<int>(w.size()) - 1;
  const Poly x = {Rat(1), k};
  const Poly y = {Rat(0), Rat(1)};
  Poly p;
  for (int i = 0; i <= d; ++i) {
    if (w[i] == 0) continue;
    Poly term = {w[i]};
    for (int j = 0; j < d - i; ++j) term = uni::mul(term, x);
    for (int j = 0; j < i; ++j) term = uni::mul(term, y);
    p = uni::add(p, term);
  }
  return p;
}

std::array<Rat, 2> dir_of(const Rat& t, const Rat& k) { return {1 + k * t, t}; }

Poly deflate(const Poly& p, const Rat& root) {
  return uni::divmod(p, Poly{-root, Rat(1)}).first;
}

MatQ columns2(const std::array<Rat, 2>& c1, const std::array<Rat, 2>& c2) {
  MatQ m(2, 2);
  m(0, 0) = c1[0];
  m(1, 0) = c1[1];
  m(0, 1) = c2[0];
  m(1, 1) = c2[1];
  return m;
}

std::array<Rat, 2> independent_axis(const std::array<Rat, 2>& v) {
  if (v[1] != 0) return {Rat(1), Rat(0)};
  return {Rat(0), Rat(1)};
}

template <class R>
Jet<R> form_jet(const std::vector<R>& w) {
  const int d = static_cast<int>(w.size()) - 1;
  Jet<R> q(2, d);
  for (int i = 0; i <= d; ++i)
    if (!(w[i] == R(0))) q.set_coeff(MultiIndex{d - i, i}, w[i]);
  return q;
}

struct CubicShape {
  int kind = 0;  // 0 squarefree, 1 one double line, 2 a perfect cube
  std::array<Rat, 2> dbl{};
  std::array<Rat, 2> simple{};
};

CubicShape cubic_shape(const std::array<Rat, 4>& c) {
  std::vector<Rat> w(c.begin(), c.end());
  const Rat k = pick_offset(w);
  Poly p = t_line(w, k);
  Poly g = uni::gcd(p, uni::derivative(p));
  CubicShape out;
  const int dg = uni::degree(g);
  if (dg <= 0) return out;
  if (dg == 1) {
    const Rat t0 = -g[0];
    Poly q = deflate(deflate(p, t0), t0);
    const Rat t1 = -q[0] / q[1];
    out.kind = 1;
    out.dbl = dir_of(t0, k);
    out.simple = dir_of(t1, k);
    return out;
  }
  // a cubic sharing a quadratic factor with its derivative is a cube
  const Rat r = -g[1] / 2;
  out.kind = 2;
  out.dbl = dir_of(r, k);
  return out;
}

// The two diagonal presentations of an equal-signs diagonal quartic are
// exchanged by a 45-degree frame change followed by rescaling; the reported
// one is chosen by smallest denominator, then smallest magnitude, then
// positive outer sign, so equivalent inputs agree on it.
struct DiagPresentation {
  int eps = 0;
  Rat a;
};

DiagPresentation mirror_presentation(int sigma, const Rat& a) {
  const Rat t = a + 2 * sigma;  // nonzero whenever |a| != 2
  return {sgn(t), (Rat(12 * sigma) - 2 * a) / abs(t)};
}

bool prefer_mirror(int eps1, const Rat& a1, int eps2, const Rat& a2) {
  if (eps1 != eps2) return eps2 > eps1;
  const Int d1 = denominator(a1), d2 = denominator(a2);
  if (d1 != d2) return d2 < d1;
  const Int n1 = abs(numerator(a1)), n2 = abs(numerator(a2));
  return n2 < n1;
}

void canonical_equal_signs_double(FourFormCanon<Rat>& out) {
  if (out.eps != out.delta || !out.has_a) return;
  const int sig = out.eps;
  const double a1 = out.a_approx;
  const double t = a1 + 2 * sig;
  const int e2 = t > 0 ? 1 : -1;
  const double a2 = (12 * sig - 2 * a1) / std::abs(t);
  const auto r1 = rationalize(a1, 1e-9, 10000);
  const auto r2 = rationalize(a2, 1e-9, 10000);
  bool take;
  if (r1 && r2)
    take = prefer_mirror(sig, *r1, e2, *r2);
  else if (r2)
    take = true;
  else if (r1)
    take = false;
  else
    take = e2 > sig;
  if (take) {
    out.eps = out.delta = e2;
    out.a_approx = a2;
  }
}

FourFormCanon<Rat> finish_case1(MatQ m, const std::array<Rat, 5>& w) {
  const JetQ work = apply_map(form_jet(std::vector<Rat>(w.begin(), w.end())), m);
  Rat al = work.coeff(MultiIndex{4, 0});
  const Rat be = work.coeff(MultiIndex{2, 2});
  Rat ga = work.coeff(MultiIndex{0, 4});
  if (al == 0 || ga == 0 || work.coeff(MultiIndex{3, 1}) != 0 ||
      work.coeff(MultiIndex{1, 3}) != 0)
    fail(errc::adaptation_failure, "frame does not diagonalize the quartic");
  if (sgn(al) < sgn(ga)) {
    std::swap(m(0, 0), m(0, 1));
    std::swap(m(1, 0), m(1, 1));
    std::swap(al, ga);
  }
  FourFormCanon<Rat> out;
  out.case_id = 1;
  out.map = std::move(m);
  out.eps = sgn(al);
  out.delta = sgn(ga);
  out.has_a = true;
  const Rat prod = abs(al * ga);
  if (auto root = exact_sqrt(prod)) {
    out.a = be / *root;
    out.exact = true;
    out.a_approx = conv::to_d(out.a);
  } else {
    out.exact = false;
    out.a_approx = conv::to_d(be) / std::sqrt(conv::to_d(prod));
  }
  if (out.eps == out.delta) {
    if (out.exact) {
      const DiagPresentation mir = mirror_presentation(out.eps, out.a);
      if (prefer_mirror(out.eps, out.a, mir.eps, mir.a)) {
        out.eps = out.delta = mir.eps;
        out.a = mir.a;
        out.a_approx = conv::to_d(out.a);
      }
    } else {
      canonical_equal_signs_double(out);
    }
  }
  return out;
}

// Diagonal frame of a squarefree quartic. A rational frame is found whenever
// one exists: the pairings of root lines are classified by a resolvent cubic,
// and each admissible pairing gives the axes as roots of a rational quadratic.
FourFormCanon<Rat> case1_diagonalize(const std::array<Rat, 5>& w) {
  if (w[1] == 0 && w[3] == 0) return finish_case1(MatQ::identity(2), w);
  std::vector<Rat> wv(w.begin(), w.end());
  const Rat k = pick_offset(wv);
  const Poly p = t_line(wv, k);
  MatQ mt = MatQ::identity(2);
  mt(0, 1) = k;
  const Rat c3 = p[3] / p[4];
  MatQ mdep = MatQ::identity(2);
  mdep(1, 0) = -c3 / 4;
  MatQ m1 = mt * mdep;
  const JetQ dep = apply_map(form_jet(wv), m1);
  const Rat b4 = dep.coeff(MultiIndex{0, 4});
  const Rat cc2 = dep.coeff(MultiIndex{2, 2}) / b4;
  const Rat cc1 = dep.coeff(MultiIndex{3, 1}) / b4;
  const Rat cc0 = dep.coeff(MultiIndex{4, 0}) / b4;
  if (cc1 == 0) return finish_case1(std::move(m1), w);
  // pairing resolvent; U = 0 is never a root since its value there is -cc1^2
  const Poly res = {-cc1 * cc1, cc2 * cc2 - 4 * cc0, 2 * cc2, Rat(1)};
  for (const Rat& u0 : uni::rational_roots(res)) {
    if (u0 == 0) continue;
    const Rat bj = 2 * cc1 / u0;
    const Rat cj = cc2 + u0;
    const Rat dj = bj * bj + 8 * cj;
    if (dj <= 0) continue;
    const auto sd = exact_sqrt(dj);
    if (!sd) continue;
    const Rat tau1 = (bj + *sd) / 4;
    const Rat tau2 = (bj - *sd) / 4;
    MatQ mtot = m1 * columns2({Rat(1), tau1}, {Rat(1), tau2});
    const JetQ chk = apply_map(form_jet(wv), mtot);
    if (chk.coeff(MultiIndex{3, 1}) != 0 || chk.coeff(MultiIndex{1, 3}) != 0) continue;
    if (chk.coeff(MultiIndex{4, 0}) == 0 || chk.coeff(MultiIndex{0, 4}) == 0) continue;
    return finish_case1(std::move(mtot), w);
  }
  // no rational axis pair: fall back to a floating frame
  const double c1d = conv::to_d(cc1);
  const double c2d = conv::to_d(cc2);
  const MatD m1d = conv::mat_to_double(m1);
  std::vector<double> wd;
  wd.reserve(wv.size());
  for (const Rat& wi : wv) wd.push_back(conv::to_d(wi));
  const JetD fw = form_jet(wd);
  const double wsc = conv::jet_scale(fw);
  for (double u0 : uni::real_roots(res)) {
    if (std::abs(u0) < 1e-12) continue;
    const double bj = 2 * c1d / u0;
    const double cj = c2d + u0;
    const double dj = bj * bj + 8 * cj;
    if (dj < 1e-12) continue;
    const double sd = std::sqrt(dj);
    MatD m2d(2, 2);
    m2d(0, 0) = 1;
    m2d(0, 1) = 1;
    m2d(1, 0) = (bj + sd) / 4;
    m2d(1, 1) = (bj - sd) / 4;
    MatD mtd = m1d * m2d;
    const JetD workd = apply_map(fw, mtd);
    double al = workd.coeff(MultiIndex{4, 0});
    const double be = workd.coeff(MultiIndex{2, 2});
    double ga = workd.coeff(MultiIndex{0, 4});
    if (zeroish(al, wsc) || zeroish(ga, wsc)) continue;
    if (!zeroish(workd.coeff(MultiIndex{3, 1}), wsc) ||
        !zeroish(workd.coeff(MultiIndex{1, 3}), wsc))
      continue;
    if ((al < 0 ? -1 : 1) < (ga < 0 ? -1 : 1)) {
      std::swap(mtd(0, 0), mtd(0, 1));
      std::swap(mtd(1, 0), mtd(1, 1));
      std::swap(al, ga);
    }
    FourFormCanon<Rat> out;
    out.case_id = 1;
    MatQ lift(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) lift(i, j) = Rat(mtd(i, j));
    out.map = std::move(lift);
    out.eps = al < 0 ? -1 : 1;
    out.delta = ga < 0 ? -1 : 1;
    out.has_a = true;
    out.exact = false;
    out.a_approx = be / std::sqrt(std::abs(al * ga));
    canonical_equal_signs_double(out);
    return out;
  }
  fail(errc::adaptation_failure, "no real diagonal frame for a squarefree quartic");
}

FourFormCanon<Rat> canonical_4form_exact(const std::array<Rat, 5>& w) {
  bool nz = false;
  for (const Rat& wi : w)
    if (wi != 0) nz = true;
  if (!nz) fail(errc::zero_form, "the zero quartic has no canonical shape");
  std::vector<Rat> wv(w.begin(), w.end());
  const Rat k = pick_offset(wv);
  const Poly p = t_line(wv, k);
  const Poly g = uni::gcd(p, uni::derivative(p));
  const int dg = uni::degree(g);
  if (dg <= 0) return case1_diagonalize(w);
  if (dg == 1) {
    // one double root line; the residual conic is non-degenerate off it
    const Rat t0 = -g[0];
    const std::array<Rat, 2> vd = dir_of(t0, k);
    MatQ m = columns2(independent_axis(vd), vd);
    JetQ work = apply_map(form_jet(wv), m);
    const Rat w2 = work.coeff(MultiIndex{2, 2});
    if (w2 == 0) fail(errc::adaptation_failure, "double-line frame degenerated");
    const Rat w1 = work.coeff(MultiIndex{3, 1});
    if (w1 != 0) {
      MatQ sh = MatQ::identity(2);
      sh(1, 0) = -w1 / (2 * w2);
      m = m * sh;
      work = apply_map(form_jet(wv), m);
    }
    const Rat al = work.coeff(MultiIndex{4, 0});
    if (al == 0) fail(errc::adaptation_failure, "double-line frame degenerated");
    FourFormCanon<Rat> out;
    out.case_id = 2;
    out.map = std::move(m);
    out.eps = sgn(al);
    out.eta = sgn(w2);
    out.exact = true;
    return out;
  }
  if (dg == 2) {
    const Rat disc = g[1] * g[1] - 4 * g[0];
    if (disc == 0) {
      // triple line and a transverse simple line
      const Rat r = -g[1] / 2;
      Poly q = deflate(deflate(deflate(p, r), r), r);
      const Rat t1 = -q[0] / q[1];
      MatQ m = columns2(dir_of(t1, k), dir_of(r, k));
      const JetQ work = apply_map(form_jet(wv), m);
      const Rat c31 = work.coeff(MultiIndex{3, 1});
      if (c31 == 0) fail(errc::adaptation_failure, "triple-line frame degenerated");
      m(0, 1) /= c31;
      m(1, 1) /= c31;
      FourFormCanon<Rat> out;
      out.case_id = 4;
      out.map = std::move(m);
      out.exact = true;
      return out;
    }
    if (disc < 0) {
      // a definite square; the diagonal frame has middle coefficient 2
      const Rat lam = p[p.size() - 1];
      MatQ mt = MatQ::identity(2);
      mt(0, 1) = k;
      MatQ sh = MatQ::identity(2);
      sh(1, 0) = -g[1] / 2;
      FourFormCanon<Rat> out;
      out.case_id = 1;
      out.map = mt * sh;
      out.eps = out.delta = sgn(lam);
      out.has_a = true;
      out.a = Rat(2 * sgn(lam));
      out.exact = true;
      out.a_approx = conv::to_d(out.a);
      return out;
    }
    // two distinct double lines
    if (const auto sd = exact_sqrt(disc)) {
      const Rat t1 = (-g[1] + *sd) / 2;
      const Rat t2 = (-g[1] - *sd) / 2;
      MatQ m = columns2(dir_of(t1, k), dir_of(t2, k));
      const JetQ work = apply_map(form_jet(wv), m);
      const Rat mid = work.coeff(MultiIndex{2, 2});
      if (mid == 0) fail(errc::adaptation_failure, "cross-square frame degenerated");
      FourFormCanon<Rat> out;
      out.case_id = 3;
      out.map = std::move(m);
      out.eta = sgn(mid);
      out.exact = true;
      return out;
    }
    const std::vector<double> ts = uni::real_roots(g);
    if (ts.size() != 2) fail(errc::adaptation_failure, "double-line pair did not separate");
    const double kd = conv::to_d(k);
    MatD md(2, 2);
    md(0, 0) = 1 + kd * ts[0];
    md(1, 0) = ts[0];
    md(0, 1) = 1 + kd * ts[1];
    md(1, 1) = ts[1];
    std::vector<double> wd;
    wd.reserve(wv.size());
    for (const Rat& wi : wv) wd.push_back(conv::to_d(wi));
    const JetD workd = apply_map(form_jet(wd), md);
    const double mid = workd.coeff(MultiIndex{2, 2});
    FourFormCanon<Rat> out;
    out.case_id = 3;
    MatQ lift(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) lift(i, j) = Rat(md(i, j));
    out.map = std::move(lift);
    out.eta = mid < 0 ? -1 : 1;
    out.exact = false;
    return out;
  }
  // dg == 3: a fourth power of one line
  const Rat r = -g[2] / 3;
  const std::array<Rat, 2> vq = dir_of(r, k);
  MatQ m = columns2(independent_axis(vq), vq);
  const JetQ work = apply_map(form_jet(wv), m);
  FourFormCanon<Rat> out;
  out.case_id = 5;
  out.map = std::move(m);
  out.eps = sgn(work.coeff(MultiIndex{4, 0}));
  out.exact = true;
  return out;
}

// Divisors assembled from the prime factors below 4096; a residual cofactor
// is kept as one extra factor so candidates with a single large prime still
// appear. Ascending, truncated at cap.
std::vector<Int> small_divisors(Int n, std::size_t cap) {
  n = abs(n);
  std::vector<std::pair<Int, int>> fac;
  for (Int d = 2; d < 4096 && d * d <= n; ++d) {
    int e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    if (e) fac.emplace_back(d, e);
  }
  if (n > 1) fac.emplace_back(n, 1);
  std::vector<Int> divs{Int(1)};
  for (const auto& [p, e] : fac) {
    const std::size_t base = divs.size();
    Int pk = 1;
    for (int j = 1; j <= e && divs.size() < 4 * cap; ++j) {
      pk *= p;
      for (std::size_t i = 0; i < base && divs.size() < 4 * cap; ++i)
        divs.push_back(divs[i] * pk);
    }
  }
  std::sort(divs.begin(), divs.end());
  if (divs.size() > cap) divs.resize(cap);
  return divs;
}

// A rational root direction of a binary cubic, when one exists. Candidates
// come from integer divisors in the finite chart, so a root whose numerator
// and denominator both contain large primes can be missed.
std::optional<std::array<Rat, 2>> cubic_rational_root(const std::array<Rat, 4>& cu) {
  std::vector<Rat> w(cu.begin(), cu.end());
  const Rat k = pick_offset(w);
  const Poly p = t_line(w, k);
  Int den = 1;
  for (const Rat& c : p) den = lcm(den, denominator(c));
  std::vector<Int> ip;
  ip.reserve(p.size());
  for (const Rat& c : p) ip.push_back(numerator(Rat(c * den)));
  const auto eval = [&p](const Rat& t) {
    Rat v(0);
    for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * t + *it;
    return v;
  };
  if (ip[0] == 0) return dir_of(Rat(0), k);
  for (const Int& q : small_divisors(ip.back(), 128)) {
    for (const Int& n : small_divisors(ip.front(), 128)) {
      const Rat t(n, q);
      if (eval(t) == 0) return dir_of(t, k);
      if (eval(-t) == 0) return dir_of(-t, k);
    }
  }
  return std::nullopt;
}

DFrame<Rat> d_frame_exact(const JetQ& f, int mu_max) {
  if (mu_max < 4) fail(errc::precondition_violated, "the route starts at subscript 4");
  if (f.max_degree() < std::max(3, mu_max - 1))
    fail(errc::insufficient_jet,
         "subscript " + std::to_string(mu_max) + " reads order " + std::to_string(mu_max - 1));
  const JetQ psi = reduce_aligned(f, 2);
  const std::array<Rat, 4> cu = {psi.coeff(MultiIndex{3, 0}), psi.coeff(MultiIndex{2, 1}),
                                 psi.coeff(MultiIndex{1, 2}), psi.coeff(MultiIndex{0, 3})};
  if (cu[0] == 0 && cu[1] == 0 && cu[2] == 0 && cu[3] == 0)
    fail(errc::cubic_zero, "cubic part vanishes");
  MatQ m(2, 2);
  if (cu[0] == 0 && cu[2] == 0) {
    // already adapted; the frame is kept
    if (cu[1] == 0) fail(errc::cubic_is_cube, "cubic part is a perfect cube");
    m(0, 0) = 1;
    m(1, 1) = 1;
  } else {
    const CubicShape shape = cubic_shape(cu);
    if (shape.kind == 2) fail(errc::cubic_is_cube, "cubic part is a perfect cube");
    if (shape.kind == 1) {
      m = columns2(shape.simple, shape.dbl);
    } else {
      // squarefree: send a rational root line to the first axis, then shear
      // away the mixed-square term; the x^2 y coefficient stays nonzero
      // because no line repeats
      const auto v = cubic_rational_root(cu);
      if (!v) fail(errc::adaptation_failure, "kernel cubic has no rational root line");
      m = columns2(*v, independent_axis(*v));
      const JetQ cf = apply_map(form_jet(std::vector<Rat>(cu.begin(), cu.end())), m);
      const Rat tau = -cf.coeff(MultiIndex{1, 2}) / (2 * cf.coeff(MultiIndex{2, 1}));
      m(0, 1) += tau * m(0, 0);
      m(1, 1) += tau * m(1, 0);
    }
  }
  JetQ work = apply_map(psi, m);
  Rat c = work.coeff(MultiIndex{2, 1});
  if (c < 0) {
    m(0, 1) = -m(0, 1);
    m(1, 1) = -m(1, 1);
    work = apply_map(psi, m);
    c = work.coeff(MultiIndex{2, 1});
  }
  JetQ sheared = work;
  std::vector<Rat> shear;
  for (int mm = 2; mm <= mu_max - 3; ++mm) {
    const Rat b = sheared.coeff(MultiIndex{1, mm + 1});
    const Rat lam = -b / (2 * c);
    shear.push_back(lam);
    if (b != 0) sheared = shear_var(sheared, 0, 1, lam, mm);
  }
  std::vector<Rat> d;
  for (int mu = 4; mu <= mu_max; ++mu)
    d.push_back(raw_partial(sheared, MultiIndex{0, mu - 1}));
  return DFrame<Rat>{std::move(m), std::move(work), std::move(sheared), std::move(c),
                     std::move(shear), std::move(d)};
}

std::optional<YtildeResult<Rat>> detect_ytilde3_exact(const JetQ& f) {
  if (f.parity() != Parity::even) fail(errc::parity_violation, "the detector is for even germs");
  if (f.max_degree() < 6) fail(errc::insufficient_jet, "the detector reads order 6");
  const JetQ psi = reduce_aligned(f, 2);
  const Rat w0 = psi.coeff(MultiIndex{4, 0});
  const Rat w1 = psi.coeff(MultiIndex{3, 1});
  const Rat w2 = psi.coeff(MultiIndex{2, 2});
  const Rat w3 = psi.coeff(MultiIndex{1, 3});
  const Rat w4 = psi.coeff(MultiIndex{0, 4});
  if (w0 == 0) fail(errc::precondition_violated, "quartic is not a definite square");
  const Rat lam = w0;
  const Rat b = w1 / (2 * lam);
  const Rat c = (w2 / lam - b * b) / 2;
  if (w3 != 2 * lam * b * c || w4 != lam * c * c)
    fail(errc::precondition_violated, "quartic is not a perfect square");
  const Rat d2 = c - b * b / 4;
  if (!(d2 > 0)) fail(errc::precondition_violated, "quartic square is not definite");
  // evaluate the sixth-order part at a root direction of the square factor;
  // additions from higher tangency terms vanish there
  const uni::QuadExt wroot(-b / 2, Rat(1), -d2);
  uni::QuadExt s(Rat(0), Rat(0), -d2);
  uni::QuadExt wp(Rat(1), Rat(0), -d2);
  for (int pd = 0; pd <= 6; ++pd) {
    const Rat cp = psi.coeff(MultiIndex{pd, 6 - pd});
    if (cp != 0) s = s + uni::QuadExt(wp.a * cp, wp.b * cp, wp.d);
    wp = wp * wroot;
  }
  const Rat a2 = s.norm() / (pow_rat(d2, 6) * pow_rat(abs(lam), 3));
  if (a2 == 0) return std::nullopt;
  YtildeResult<Rat> out;
  out.eps = sgn(lam);
  if (const auto rt = exact_sqrt(a2)) {
    out.a = *rt;
    out.exact = true;
    out.a_approx = conv::to_d(out.a);
  } else {
    out.exact = false;
    out.a_approx = std::sqrt(conv::to_d(a2));
  }
  return out;
}

void stamp(SingularityLabel& label) {
  const ClassMetadata md = catalogue_metadata(label);
  label.mult = md.mult;
  label.codim = md.codim;
  label.beta = md.beta;
  label.modality = md.modality;
}

std::optional<SingularityLabel> detect_ze7_exact(const JetQ& f) {
  if (f.parity() != Parity::even) fail(errc::parity_violation, "the detector is for even germs");
  if (f.max_degree() < 6) fail(errc::insufficient_jet, "the detector reads order 6");
  const JetQ psi = reduce_aligned(f, 2);
  const std::array<Rat, 5> w = {psi.coeff(MultiIndex{4, 0}), psi.coeff(MultiIndex{3, 1}),
                                psi.coeff(MultiIndex{2, 2}), psi.coeff(MultiIndex{1, 3}),
                                psi.coeff(MultiIndex{0, 4})};
  if (w[0] == 0 && w[1] == 0 && w[2] == 0 && w[3] == 0 && w[4] == 0)
    fail(errc::precondition_violated, "quartic part vanishes");
  const FourFormCanon<Rat> canon = canonical_4form_exact(w);
  if (canon.case_id != 4)
    fail(errc::precondition_violated, "quartic is not a triple line with a transverse line");
  const JetQ work = apply_map(psi, canon.map);
  const Rat e6 = work.coeff(MultiIndex{0, 6});
  if (e6 == 0) return std::nullopt;
  const Rat e15 = work.coeff(MultiIndex{1, 5});
  SingularityLabel out;
  out.family = Family::z_e;
  out.index = 7;
  out.sign1 = sgn(e6);
  out.has_modulus = true;
  const Rat ae = abs(e6);
  if (const auto rho = exact_root(ae, 9)) {
    out.modulus = ScalarReport::from_rat(e15 / pow_rat(*rho, 7));
  } else {
    out.modulus =
        ScalarReport::from_double(conv::to_d(e15) / std::pow(conv::to_d(ae), 7.0 / 9.0));
    out.flags.push_back("floating");
  }
  out.reason = "triple-line quartic with a transverse sixth-order term";
  out.flags.push_back("route:beyond-tabulated");
  stamp(out);
  return out;
}

SingularityLabel make_unknown(std::string reason) {
  SingularityLabel out;
  out.family = Family::unknown;
  out.reason = std::move(reason);
  return out;
}

// Route for a quartic that splits into two distinct line squares: shear away
// the mixed terms and read the leading pure powers on both axes.
template <class R>
SingularityLabel ye_route(const Jet<R>& psi, const Matrix<R>& map) {
  const Jet<R> work = apply_map(psi, map);
  const int N = work.max_degree();
  if (N < 6) fail(errc::insufficient_jet, "the cross-square route reads order 6");
  const double scale = conv::jet_scale(work);
  const R beta = work.coeff(MultiIndex{2, 2});
  if (zeroish(beta, scale))
    fail(errc::adaptation_failure, "cross coefficient vanished in the cross-square frame");
  Jet<R> sheared = work;
  for (int dd = 6; dd <= N; dd += 2) {
    const R bx = sheared.coeff(MultiIndex{1, dd - 1});
    if (!zeroish(bx, scale)) sheared = shear_var(sheared, 0, 1, R(-bx / (2 * beta)), dd - 3);
    const R by = sheared.coeff(MultiIndex{dd - 1, 1});
    if (!zeroish(by, scale)) sheared = shear_var(sheared, 1, 0, R(-by / (2 * beta)), dd - 3);
  }
  int r = 0, s = 0;
  R pv{}, qv{};
  for (int rr = 3; 2 * rr <= N; ++rr) {
    const R v = sheared.coeff(MultiIndex{2 * rr, 0});
    if (!zeroish(v, scale)) {
      r = rr;
      pv = v;
      break;
    }
  }
  for (int ss = 3; 2 * ss <= N; ++ss) {
    const R v = sheared.coeff(MultiIndex{0, 2 * ss});
    if (!zeroish(v, scale)) {
      s = ss;
      qv = v;
      break;
    }
  }
  if (r == 0 || s == 0) {
    SingularityLabel out =
        make_unknown("cross-square quartic: no pure even power through the stored order");
    out.flags.push_back("route:beyond-tabulated");
    return out;
  }
  if (r > s) {
    std::swap(r, s);
    std::swap(pv, qv);
  }
  SingularityLabel out;
  out.family = Family::y_e_candidate;
  out.r = r;
  out.s = s;
  out.sign1 = sgn(pv);
  out.sign2 = sgn(qv);
  out.has_modulus = true;
  bool have_exact = false;
  if constexpr (is_exact_v<R>) {
    const auto rho = exact_root(abs(pv), r);
    const auto sig = exact_root(abs(qv), s);
    if (rho && sig) {
      out.modulus = ScalarReport::from_rat(beta / (*rho * *sig));
      have_exact = true;
    }
  }
  if (!have_exact) {
    const double ad =
        conv::to_d(beta) / (std::pow(std::abs(conv::to_d(pv)), 1.0 / r) *
                            std::pow(std::abs(conv::to_d(qv)), 1.0 / s));
    out.modulus = ScalarReport::from_double(ad);
    out.flags.push_back("floating");
  }
  out.reason = "quartic splits into two distinct line squares; pure powers at orders " +
               std::to_string(2 * r) + " and " + std::to_string(2 * s);
  out.flags.push_back("route:beyond-tabulated");
  stamp(out);
  return out;
}

SingularityLabel classify_exact(const JetQ& f, const ClassifyOptions& opt) {
  const int nu = f.nu();
  const int N = f.max_degree();
  const bool even = f.parity() == Parity::even;
  if (N >= 1) {
    for (const auto& e : indices_of_degree(nu, 1)) {
      if (f.coeff(e) != 0) {
        SingularityLabel out;
        out.family = Family::regular;
        out.reason = "nonzero linear part";
        return out;
      }
    }
  }
  if (N < 2) fail(errc::insufficient_jet, "classification starts at the 2-jet");
  const KernelReduction<Rat> kr = kernel_reduction(f, opt.tol);
  const int c = kr.analysis.corank;
  if (c == 0) {
    SingularityLabel out;
    out.family = even ? Family::a_e : Family::morse;
    out.index = 1;
    out.sign1 = kr.analysis.n_minus == 0 ? 1 : (kr.analysis.n_plus == 0 ? -1 : 0);
    out.reason = "non-degenerate Hessian; inertia (" + std::to_string(kr.analysis.n_plus) +
                 ", " + std::to_string(kr.analysis.n_minus) + ")";
    stamp(out);
    return out;
  }
  if (c > 2)
    return make_unknown("corank " + std::to_string(c) +
                        " is outside the tabulated range; its quadratic data alone carries " +
                        std::to_string(c * (c + 1) / 2) + " independent conditions");
  if (c == 1) {
    const JetQ& psi = kr.reduced;
    if (even) {
      const int cap = std::min(opt.mu_max, N / 2);
      if (cap < 2) fail(errc::insufficient_jet, "the even one-variable route reads order 4");
      for (int mu = 2; mu <= cap; ++mu) {
        const Rat v = raw_partial(psi, MultiIndex{2 * mu});
        if (v == 0) continue;
        SingularityLabel out;
        out.family = Family::a_e;
        out.index = mu;
        out.sign1 = sgn(v);
        out.reason =
            "first nonzero reduced derivative at even order " + std::to_string(2 * mu);
        stamp(out);
        return out;
      }
      return make_unknown("reduced even derivatives vanish through order " +
                          std::to_string(2 * cap));
    }
    const int cap = std::min(opt.mu_max, N - 1);
    if (cap < 2) fail(errc::insufficient_jet, "the one-variable route reads order 3");
    for (int mu = 2; mu <= cap; ++mu) {
      const Rat v = raw_partial(psi, MultiIndex{mu + 1});
      if (v == 0) continue;
      SingularityLabel out;
      out.family = Family::a;
      out.index = mu;
      out.sign1 = sgn(v);
      out.reason = "first nonzero reduced derivative at order " + std::to_string(mu + 1);
      stamp(out);
      return out;
    }
    return make_unknown("reduced derivatives vanish through order " + std::to_string(cap + 1));
  }
  const JetQ& psi = kr.reduced;
  if (!even) {
    if (N < 3) fail(errc::insufficient_jet, "the corank-2 route reads order 3");
    const std::array<Rat, 4> cu = {psi.coeff(MultiIndex{3, 0}), psi.coeff(MultiIndex{2, 1}),
                                   psi.coeff(MultiIndex{1, 2}), psi.coeff(MultiIndex{0, 3})};
    if (cu[0] == 0 && cu[1] == 0 && cu[2] == 0 && cu[3] == 0)
      return make_unknown("cubic part vanishes at corank 2");
    const Rat d3 = delta3_form(cu);
    if (d3 != 0) {
      SingularityLabel out;
      out.family = Family::d;
      out.index = 4;
      out.sign1 = sgn(d3);
      out.reason = "squarefree cubic part";
      stamp(out);
      return out;
    }
    const CubicShape shape = cubic_shape(cu);
    if (shape.kind == 2) {
      if (N < 4) fail(errc::insufficient_jet, "the cube route reads order 4");
      MatQ m = columns2(independent_axis(shape.dbl), shape.dbl);
      JetQ work = apply_map(psi, m);
      if (work.coeff(MultiIndex{3, 0}) < 0) {
        m(0, 0) = -m(0, 0);
        m(1, 0) = -m(1, 0);
        work = apply_map(psi, m);
      }
      const Rat q04 = work.coeff(MultiIndex{0, 4});
      if (q04 != 0) {
        SingularityLabel out;
        out.family = Family::e6;
        out.index = 6;
        out.sign1 = sgn(q04);
        out.reason = "cubic is a perfect cube with a transverse fourth-order term";
        stamp(out);
        return out;
      }
      return make_unknown("cubic is a perfect cube and the transverse fourth-order term vanishes");
    }
    const int cap = std::min(opt.mu_max, N + 1);
    const DFrame<Rat> frame = d_frame(kr.aligned, cap);
    for (int mu = 5; mu <= cap; ++mu) {
      const Rat v = frame.d[mu - 4];
      if (v == 0) continue;
      SingularityLabel out;
      out.family = Family::d;
      out.index = mu;
      out.sign1 = sgn(v);
      out.reason = "cubic has one double line; first transverse power at order " +
                   std::to_string(mu - 1);
      stamp(out);
      return out;
    }
    return make_unknown("cubic has one double line and the transverse reads vanish through order " +
                        std::to_string(cap - 1));
  }
  if (N < 4) fail(errc::insufficient_jet, "the even corank-2 route reads order 4");
  const std::array<Rat, 5> w = {psi.coeff(MultiIndex{4, 0}), psi.coeff(MultiIndex{3, 1}),
                                psi.coeff(MultiIndex{2, 2}), psi.coeff(MultiIndex{1, 3}),
                                psi.coeff(MultiIndex{0, 4})};
  if (w[0] == 0 && w[1] == 0 && w[2] == 0 && w[3] == 0 && w[4] == 0)
    return make_unknown("quartic part vanishes at corank 2");
  const FourFormCanon<Rat> canon = canonical_4form_exact(w);
  switch (canon.case_id) {
    case 1: {
      if (canon.exact && canon.eps == canon.delta && (canon.a == 2 || canon.a == -2)) {
        if (const auto yt = detect_ytilde3(kr.aligned)) {
          SingularityLabel out;
          out.family = Family::y_tilde_e;
          out.index = 3;
          out.sign1 = yt->eps;
          out.has_modulus = true;
          if (yt->exact) {
            out.modulus = ScalarReport::from_rat(yt->a);
          } else {
            out.modulus = ScalarReport::from_double(yt->a_approx);
            out.flags.push_back("floating");
          }
          out.reason = "definite quartic square with a nonzero reduced sixth-order coefficient";
          out.flags.push_back("route:beyond-tabulated");
          stamp(out);
          return out;
        }
        return make_unknown("definite quartic square whose reduced sixth-order coefficient vanishes");
      }
      SingularityLabel out;
      out.family = Family::x_e;
      out.index = 5;
      out.sign1 = canon.eps;
      out.sign2 = canon.delta;
      out.has_modulus = true;
      if (canon.exact) {
        out.modulus = ScalarReport::from_rat(canon.a);
      } else {
        out.modulus = ScalarReport::from_double(canon.a_approx);
        out.flags.push_back("floating");
      }
      out.reason = "squarefree quartic in a diagonal frame";
      stamp(out);
      return out;
    }
    case 2: {
      const int cap = std::min(opt.mu_max, (N + 6) / 2);
      if (cap < 6) fail(errc::insufficient_jet, "the degenerate-quartic route reads order 6");
      const JetQ work = apply_map(psi, canon.map);
      const XeFrame<Rat> xf = x_e_frame(work, cap, canon.eps, canon.eta);
      for (int mu = 6; mu <= cap; ++mu) {
        const Rat v = xf.x[mu - 5];
        if (v == 0) continue;
        SingularityLabel out;
        out.family = Family::x_e;
        out.index = mu;
        out.sign1 = canon.eps;
        out.sign2 = canon.eta;
        out.has_modulus = true;
        const Rat q = v / Rat(MultiIndex{0, 2 * mu - 6}.factorial());
        const Rat num = pow_rat(abs(xf.alpha), mu - 3);
        const Rat den = pow_rat(abs(xf.beta), mu - 3);
        if (const auto rt = exact_sqrt(num)) {
          out.modulus = ScalarReport::from_rat(q * *rt / den);
        } else {
          out.modulus = ScalarReport::from_double(conv::to_d(q) * std::sqrt(conv::to_d(num)) /
                                                  conv::to_d(den));
          out.flags.push_back("floating");
        }
        out.reason = "doubly degenerate quartic; first transverse even power at order " +
                     std::to_string(2 * mu - 6);
        stamp(out);
        return out;
      }
      return make_unknown("doubly degenerate quartic with transverse reads vanishing through order " +
                          std::to_string(2 * cap - 6));
    }
    case 3: {
      if (canon.exact) return ye_route(psi, canon.map);
      SingularityLabel out = ye_route(conv::jet_to_double(psi), conv::mat_to_double(canon.map));
      bool has = false;
      for (const auto& fl : out.flags) has = has || fl == "floating";
      if (!has) out.flags.push_back("floating");
      return out;
    }
    case 4: {
      if (auto z = detect_ze7(kr.aligned)) return *z;
      return make_unknown("triple-line quartic whose transverse sixth-order coefficient vanishes");
    }
    default:
      return make_unknown("quartic is a fourth power of one line");
  }
}

}  // namespace

template <class R>
KernelReduction<R> kernel_reduction(const Jet<R>& f, double tol) {
  HessianAnalysis<R> h = hessian_analysis(f, tol);
  Jet<R> aligned = align_kernel(f, h);
  const int c = h.corank;
  std::vector<Jet<R>> z;
  Jet<R> reduced = aligned;
  if (c > 0 && c < f.nu()) {
    z = solve_stationary(aligned, c, h.regular_block_inverse);
    std::vector<Jet<R>> subst =
        identity_substitution<R>(c, std::max(2, aligned.max_degree() - 1));
    subst.insert(subst.end(), z.begin(), z.end());
    reduced = compose_poly(aligned, subst);
  }
  return KernelReduction<R>{std::move(h), std::move(aligned), std::move(reduced), std::move(z)};
}

template <class R>
std::vector<R> a_seq(const Jet<R>& aligned, int mu_max) {
  if (mu_max < 2) fail(errc::precondition_violated, "the sequence starts at subscript 2");
  if (aligned.max_degree() < mu_max + 1)
    fail(errc::insufficient_jet,
         "subscript " + std::to_string(mu_max) + " reads order " + std::to_string(mu_max + 1));
  const Jet<R> psi = reduce_aligned(aligned, 1);
  std::vector<R> out;
  out.reserve(mu_max - 1);
  for (int mu = 2; mu <= mu_max; ++mu) out.push_back(raw_partial(psi, MultiIndex{mu + 1}));
  return out;
}

template <class R>
std::vector<R> a_e_seq(const Jet<R>& aligned, int mu_max) {
  if (aligned.parity() != Parity::even)
    fail(errc::parity_violation, "the sequence is for even germs");
  if (mu_max < 2) fail(errc::precondition_violated, "the sequence starts at subscript 2");
  if (aligned.max_degree() < 2 * mu_max)
    fail(errc::insufficient_jet,
         "subscript " + std::to_string(mu_max) + " reads order " + std::to_string(2 * mu_max));
  const Jet<R> psi = reduce_aligned(aligned, 1);
  std::vector<R> out;
  out.reserve(mu_max - 1);
  for (int mu = 2; mu <= mu_max; ++mu) out.push_back(raw_partial(psi, MultiIndex{2 * mu}));
  return out;
}

template <class R>
R delta3(const Jet<R>& aligned_corank2) {
  if (aligned_corank2.max_degree() < 3)
    fail(errc::insufficient_jet, "the cubic discriminant reads order 3");
  const Jet<R> psi = reduce_aligned(aligned_corank2, 2);
  return delta3_form<R>({psi.coeff(MultiIndex{3, 0}), psi.coeff(MultiIndex{2, 1}),
                         psi.coeff(MultiIndex{1, 2}), psi.coeff(MultiIndex{0, 3})});
}

template <class R>
R delta4_of(const std::array<R, 5>& q) {
  const R &A = q[0], &B = q[1], &C = q[2], &D = q[3], &E = q[4];
  const R c2 = C * C - R(4) * A * E;
  return R(16) * A * E * c2 * c2 -
         R(4) * (A * C * C * C * D * D + B * B * B * D * D * D + B * B * C * C * C * E) -
         R(27) * (A * A * D * D * D * D + B * B * B * B * E * E) + B * B * C * C * D * D +
         R(18) * (A * B * C * D * D * D + B * B * B * C * D * E) +
         R(144) * (A * A * C * D * D * E + A * B * B * C * E * E) -
         R(6) * A * B * B * D * D * E - R(80) * A * B * C * C * D * E -
         R(192) * A * A * B * D * E * E;
}

template <class R>
R delta4(const Jet<R>& aligned_corank2) {
  if (aligned_corank2.parity() != Parity::even)
    fail(errc::parity_violation, "the quartic discriminant is for even germs");
  if (aligned_corank2.max_degree() < 4)
    fail(errc::insufficient_jet, "the quartic discriminant reads order 4");
  const Jet<R> psi = reduce_aligned(aligned_corank2, 2);
  return delta4_of<R>({psi.coeff(MultiIndex{4, 0}), psi.coeff(MultiIndex{3, 1}),
                       psi.coeff(MultiIndex{2, 2}), psi.coeff(MultiIndex{1, 3}),
                       psi.coeff(MultiIndex{0, 4})});
}

template <class R>
DFrame<R> d_frame(const Jet<R>& aligned_corank2, int mu_max) {
  if constexpr (is_exact_v<R>) {
    return d_frame_exact(aligned_corank2, mu_max);
  } else {
    DFrame<Rat> e = d_frame_exact(conv::snap_jet(aligned_corank2, 1e-8), mu_max);
    DFrame<double> out{conv::mat_to_double(e.map),
                       conv::jet_to_double(e.reduced),
                       conv::jet_to_double(e.sheared),
                       conv::to_d(e.c),
                       {},
                       {}};
    out.shear.reserve(e.shear.size());
    for (const Rat& v : e.shear) out.shear.push_back(conv::to_d(v));
    out.d.reserve(e.d.size());
    for (const Rat& v : e.d) out.d.push_back(conv::to_d(v));
    return out;
  }
}

template <class R>
std::vector<R> d_seq(const Jet<R>& aligned_corank2, int mu_max) {
  return d_frame(aligned_corank2, mu_max).d;
}

template <class R>
FourFormCanon<R> canonical_4form(const std::array<R, 5>& divided_quartic) {
  if constexpr (is_exact_v<R>) {
    return canonical_4form_exact(divided_quartic);
  } else {
    double scale = 0.0;
    for (double v : divided_quartic) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) fail(errc::zero_form, "the zero quartic has no canonical shape");
    std::array<Rat, 5> wq;
    for (int i = 0; i < 5; ++i) {
      const double v = divided_quartic[i];
      if (std::abs(v) <= 1e-9 * scale) {
        wq[i] = 0;
        continue;
      }
      const auto q = rationalize(v, 1e-7);
      wq[i] = q ? *q : Rat(v);
    }
    const FourFormCanon<Rat> e = canonical_4form_exact(wq);
    FourFormCanon<double> out;
    out.case_id = e.case_id;
    out.map = conv::mat_to_double(e.map);
    out.eps = e.eps;
    out.eta = e.eta;
    out.delta = e.delta;
    out.has_a = e.has_a;
    out.exact = false;
    if (e.has_a) {
      out.a = e.exact ? conv::to_d(e.a) : e.a_approx;
      out.a_approx = out.a;
    }
    return out;
  }
}

template <class R>
XeFrame<R> x_e_frame(const Jet<R>& adapted, int mu_max, int eps, int eta) {
  if (adapted.parity() != Parity::even) fail(errc::parity_violation, "the route is for even germs");
  if (mu_max < 5) fail(errc::precondition_violated, "the route starts at subscript 5");
  if ((eps != 1 && eps != -1) || (eta != 1 && eta != -1))
    fail(errc::precondition_violated, "sign arguments must be +1 or -1");
  if (adapted.max_degree() < 2 * mu_max - 6)
    fail(errc::insufficient_jet, "subscript " + std::to_string(mu_max) + " reads order " +
                                     std::to_string(2 * mu_max - 6));
  const Jet<R> psi = reduce_aligned(adapted, 2);
  const double scale = conv::jet_scale(psi);
  const R alpha = psi.coeff(MultiIndex{4, 0});
  const R beta = psi.coeff(MultiIndex{2, 2});
  if (zeroish(alpha, scale) || sgn(alpha) != eps)
    fail(errc::adaptation_failure, "the pure fourth-power coefficient must match the stated sign");
  if (zeroish(beta, scale) || sgn(beta) != eta)
    fail(errc::adaptation_failure, "the cross coefficient must match the stated sign");
  if (!zeroish(psi.coeff(MultiIndex{3, 1}), scale) ||
      !zeroish(psi.coeff(MultiIndex{1, 3}), scale))
    fail(errc::adaptation_failure, "mixed odd quartic terms must vanish");
  const R gamma = psi.coeff(MultiIndex{0, 4});
  const R square_gap = gamma - beta * beta / (4 * alpha);
  if (zeroish(square_gap, scale)) fail(errc::adaptation_failure, "quartic is a perfect square");
  Jet<R> sheared = psi;
  std::vector<R> shear;
  for (int j = 1; j <= mu_max - 5; ++j) {
    const R b = sheared.coeff(MultiIndex{1, 2 * j + 3});
    const R lam = -b / (2 * beta);
    shear.push_back(lam);
    if (!zeroish(b, scale)) sheared = shear_var(sheared, 0, 1, lam, 2 * j + 1);
  }
  std::vector<R> x;
  x.reserve(mu_max - 4);
  for (int mu = 5; mu <= mu_max; ++mu)
    x.push_back(raw_partial(sheared, MultiIndex{0, 2 * mu - 6}));
  return XeFrame<R>{std::move(sheared), alpha, beta, std::move(shear), std::move(x)};
}

template <class R>
std::vector<R> x_e_seq(const Jet<R>& adapted, int mu_max, int eps, int eta) {
  return x_e_frame(adapted, mu_max, eps, eta).x;
}

template <class R>
std::optional<YtildeResult<R>> detect_ytilde3(const Jet<R>& aligned_even) {
  if constexpr (is_exact_v<R>) {
    return detect_ytilde3_exact(aligned_even);
  } else {
    const auto e = detect_ytilde3_exact(conv::snap_jet(aligned_even, 1e-8));
    if (!e) return std::nullopt;
    YtildeResult<double> out;
    out.eps = e->eps;
    out.exact = false;
    out.a = e->exact ? conv::to_d(e->a) : e->a_approx;
    out.a_approx = out.a;
    return out;
  }
}

template <class R>
std::optional<SingularityLabel> detect_ze7(const Jet<R>& aligned_even) {
  if constexpr (is_exact_v<R>) {
    return detect_ze7_exact(aligned_even);
  } else {
    auto e = detect_ze7_exact(conv::snap_jet(aligned_even, 1e-8));
    if (!e) return std::nullopt;
    if (e->has_modulus && e->modulus.exact)
      e->modulus = ScalarReport::from_double(e->modulus.value);
    bool has = false;
    for (const auto& fl : e->flags) has = has || fl == "floating";
    if (!has) e->flags.push_back("floating");
    return e;
  }
}

template <class R>
SingularityLabel classify(const Jet<R>& f, ClassifyOptions options) {
  if constexpr (is_exact_v<R>) {
    SingularityLabel out = classify_exact(f, options);
    if (f.heuristic()) out.flags.push_back("heuristic-input");
    return out;
  } else {
    const JetQ fq = conv::snap_jet(f, options.tol);
    SingularityLabel out = classify_exact(fq, options);
    if (out.has_modulus && out.modulus.exact)
      out.modulus = ScalarReport::from_double(out.modulus.value);
    bool has = false;
    for (const auto& fl : out.flags) has = has || fl == "floating";
    if (!has) out.flags.push_back("floating");
    if (f.heuristic()) out.flags.push_back("heuristic-input");
    return out;
  }
}

template KernelReduction<Rat> kernel_reduction<Rat>(const Jet<Rat>&, double);
template KernelReduction<double> kernel_reduction<double>(const Jet<double>&, double);
template std::vector<Rat> a_seq<Rat>(const Jet<Rat>&, int);
template std::vector<double> a_seq<double>(const Jet<double>&, int);
template std::vector<Rat> a_e_seq<Rat>(const Jet<Rat>&, int);
template std::vector<double> a_e_seq<double>(const Jet<double>&, int);
template Rat delta3<Rat>(const Jet<Rat>&);
template double delta3<double>(const Jet<double>&);
template Rat delta4<Rat>(const Jet<Rat>&);
template double delta4<double>(const Jet<double>&);
template Rat delta4_of<Rat>(const std::array<Rat, 5>&);
template double delta4_of<double>(const std::array<double, 5>&);
template DFrame<Rat> d_frame<Rat>(const Jet<Rat>&, int);
template DFrame<double> d_frame<double>(const Jet<double>&, int);
template std::vector<Rat> d_seq<Rat>(const Jet<Rat>&, int);
template std::vector<double> d_seq<double>(const Jet<double>&, int);
template FourFormCanon<Rat> canonical_4form<Rat>(const std::array<Rat, 5>&);
template FourFormCanon<double> canonical_4form<double>(const std::array<double, 5>&);
template XeFrame<Rat> x_e_frame<Rat>(const Jet<Rat>&, int, int, int);
template XeFrame<double> x_e_frame<double>(const Jet<double>&, int, int, int);
template std::vector<Rat> x_e_seq<Rat>(const Jet<Rat>&, int, int, int);
template std::vector<double> x_e_seq<double>(const Jet<double>&, int, int, int);
template std::optional<YtildeResult<Rat>> detect_ytilde3<Rat>(const Jet<Rat>&);
template std::optional<YtildeResult<double>> detect_ytilde3<double>(const Jet<double>&);
template std::optional<SingularityLabel> detect_ze7<Rat>(const Jet<Rat>&);
template std::optional<SingularityLabel> detect_ze7<double>(const Jet<double>&);
template SingularityLabel classify<Rat>(const Jet<Rat>&, ClassifyOptions);
template SingularityLabel classify<double>(const Jet<double>&, ClassifyOptions);

}  // namespace germlab
