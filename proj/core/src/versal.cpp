#include "germlab/versal.hpp"

#include "germlab/detect.hpp"
#include "germlab/errors.hpp"
#include "germlab/localalg.hpp"
#include "germlab/matrix.hpp"

#include "convert.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

namespace germlab {

namespace {

template <class R>
int sgn(const R& v) {
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

template <class R>
bool zeroish(const R& v, double scale) {
  if constexpr (scalar_traits<R>::exact)
    return v == 0;
  else
    return std::abs(conv::to_d(v)) <= 1e-9 * scale;
}

template <class R>
std::string num_str(const R& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string mono_name(const MultiIndex& alpha) {
  std::string out;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += "k" + std::to_string(i + 1);
    if (alpha[i] > 1) out += "^" + std::to_string(alpha[i]);
  }
  return out.empty() ? "1" : out;
}

// copy with the stored order raised; absent coefficients are genuine zeros
template <class R>
Jet<R> lift_degree(const Jet<R>& f, int n) {
  if (f.max_degree() >= n) return f;
  Jet<R> out(f.nu(), n, f.parity());
  for (const auto& [alpha, v] : f.coeffs()) out.set_coeff(alpha, v);
  if (f.heuristic()) out.mark_heuristic();
  return out;
}

// x -> x + lam * y^power in two variables
template <class R>
std::vector<Jet<R>> shear_subst(int n, const R& lam, int power) {
  Jet<R> sx(2, n, Parity::general);
  sx.set_coeff(MultiIndex{1, 0}, R(1));
  sx.set_coeff(MultiIndex{0, power}, lam);
  Jet<R> sy(2, n, Parity::general);
  sy.set_coeff(MultiIndex{0, 1}, R(1));
  return {std::move(sx), std::move(sy)};
}

template <class R>
struct Envelope {
  Jet<R> work;               // base after eliminating the regular variables
  std::vector<Jet<R>> psi;   // directions along the same stationary substitution
};

// The first-order parameter response of the reduced family: differentiating
// F(k, Z(k, lambda), lambda) in lambda at 0 kills the Z-derivative term
// because Z is stationary, so each direction is simply composed with the
// base solution Z0.
template <class R>
Envelope<R> envelope(const DeformationJet<R>& dj, int corank) {
  KernelReduction<R> kr = kernel_reduction(dj.base);
  if (kr.analysis.corank != corank)
    fail(errc::precondition_violated, "base corank does not match the requested test");
  if (!(kr.aligned == dj.base))
    fail(errc::precondition_violated, "base must be kernel-aligned (kernel variables first)");

  Envelope<R> out{kr.reduced, {}};
  const int nu = dj.base.nu();
  if (nu == corank) {
    out.psi = dj.dirs;
    return out;
  }
  const int n = dj.base.max_degree();
  std::vector<Jet<R>> subst;
  for (int i = 0; i < corank; ++i) {
    Jet<R> xi(corank, n, Parity::general);
    MultiIndex e(static_cast<std::size_t>(corank));
    e[static_cast<std::size_t>(i)] = 1;
    xi.set_coeff(e, R(1));
    subst.push_back(std::move(xi));
  }
  for (const auto& z : kr.z_of_k) subst.push_back(z);
  out.psi.reserve(dj.dirs.size());
  for (const auto& g : dj.dirs) out.psi.push_back(compose_poly(g, subst));
  return out;
}

struct RankResult {
  int rank = 0;
  bool unstable = false;
};

template <class R>
RankResult rank_of(const std::vector<std::pair<std::string, std::vector<R>>>& set, int l,
                   double tol) {
  if (set.empty() || l == 0) return {0, false};
  if constexpr (scalar_traits<R>::exact) {
    Matrix<R> m(set.size(), static_cast<std::size_t>(l));
    for (std::size_t i = 0; i < set.size(); ++i)
      for (int j = 0; j < l; ++j) m(i, static_cast<std::size_t>(j)) = set[i].second[j];
    return {static_cast<int>(rank(std::move(m))), false};
  } else {
    Eigen::MatrixXd m(set.size(), l);
    for (std::size_t i = 0; i < set.size(); ++i)
      for (int j = 0; j < l; ++j) m(static_cast<Eigen::Index>(i), j) = set[i].second[j];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return {0, false};
    RankResult out;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) >= tol * sv(0))
        ++out.rank;
      else if (sv(i) >= tol * 1e-2 * sv(0))
        out.unstable = true;
    }
    return out;
  }
}

template <class R>
void finish_report(VersalityReport<R>& rep, int l, double tol) {
  RankResult rr = rank_of(rep.combined_test_set, l, tol);
  rep.rank = rr.rank;
  const int need = static_cast<int>(rep.combined_test_set.size());
  if (rr.unstable) {
    rep.verdict = Verdict::undetermined;
    rep.reason = "rank unstable inside the tolerance guard band";
  } else if (rep.rank == need) {
    rep.verdict = Verdict::versal;
    rep.reason = "test vectors are linearly independent";
  } else {
    rep.verdict = Verdict::not_versal;
    rep.reason = "test set has rank " + std::to_string(rep.rank) + " but needs " +
                 std::to_string(need);
  }
}

// in-place dst += coeff * src
template <class R>
void add_scaled(std::vector<R>& dst, const R& coeff, const std::vector<R>& src) {
  for (std::size_t j = 0; j < dst.size(); ++j) {
    R t = coeff;
    t *= src[j];
    dst[j] += t;
  }
}

VersalityReport<Rat> quotient_route_exact(const DeformationJet<Rat>& dj,
                                          const SingularityLabel& label) {
  VersalityReport<Rat> rep;
  rep.min_parameters = std::max(0, label.mult - 1);

  MultiplicityResult mres = multiplicity(dj.base);
  if (!mres.basis.stabilized)
    fail(errc::not_stabilized, "local algebra dimension did not stabilize");
  const int T = mres.basis.truncation_degree;

  std::vector<MultiIndex> cols = algebra_columns(dj.base.nu(), T, dj.base.parity());
  std::map<MultiIndex, std::size_t> col_of;
  for (std::size_t j = 0; j < cols.size(); ++j) col_of[cols[j]] = j;

  MatQ g = gradient_relation_matrix(dj.base, T, cols);
  std::vector<std::size_t> pivots = rref(g);

  // direction coefficients in the same coordinates, reduced against the span
  std::vector<std::vector<Rat>> cls;
  for (const auto& dir : dj.dirs) {
    std::vector<Rat> row(cols.size(), Rat(0));
    for (const auto& [alpha, c] : dir.coeffs()) {
      auto it = col_of.find(alpha);
      if (it != col_of.end()) row[it->second] = c;
    }
    for (std::size_t r = 0; r < pivots.size(); ++r) {
      Rat factor = row[pivots[r]];
      if (factor == 0) continue;
      for (std::size_t j = 0; j < cols.size(); ++j) {
        Rat t = factor;
        t *= g(r, j);
        row[j] -= t;
      }
    }
    cls.push_back(std::move(row));
  }

  // coordinates on the surviving classes of the maximal ideal, one test
  // vector per class
  std::vector<bool> is_pivot(cols.size(), false);
  for (std::size_t p : pivots) is_pivot[p] = true;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (is_pivot[j] || cols[j].degree() == 0) continue;
    std::vector<Rat> vec(dj.dirs.size());
    for (std::size_t d = 0; d < cls.size(); ++d) vec[d] = cls[d][j];
    rep.combined_test_set.emplace_back("[" + mono_name(cols[j]) + "]", vec);
    rep.vectors.emplace_back("[" + mono_name(cols[j]) + "]", std::move(vec));
  }

  finish_report(rep, dj.l(), 1e-8);
  return rep;
}

template <class R>
VersalityReport<R> quotient_route(const DeformationJet<R>& dj, const SingularityLabel& label) {
  if constexpr (scalar_traits<R>::exact) {
    return quotient_route_exact(dj, label);
  } else {
    DeformationJet<Rat> snapped{conv::snap_jet(dj.base), {}};
    for (const auto& d : dj.dirs) snapped.dirs.push_back(conv::snap_jet(d));
    VersalityReport<Rat> rq = quotient_route_exact(snapped, label);
    VersalityReport<R> rep;
    rep.rank = rq.rank;
    rep.verdict = rq.verdict;
    rep.reason = rq.reason + " (inputs snapped to rationals for the span test)";
    rep.min_parameters = rq.min_parameters;
    for (auto& [name, vec] : rq.vectors) {
      std::vector<R> v(vec.size());
      for (std::size_t i = 0; i < vec.size(); ++i) v[i] = conv::to_d(vec[i]);
      rep.vectors.emplace_back(name, v);
    }
    for (auto& [name, vec] : rq.combined_test_set) {
      std::vector<R> v(vec.size());
      for (std::size_t i = 0; i < vec.size(); ++i) v[i] = conv::to_d(vec[i]);
      rep.combined_test_set.emplace_back(name, std::move(v));
    }
    return rep;
  }
}

}  // namespace

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::versal: return "versal";
    case Verdict::not_versal: return "not_versal";
    case Verdict::undetermined: return "undetermined";
  }
  return "undetermined";
}

template <class R>
DeformationJet<R> make_deformation(Jet<R> base, std::vector<Jet<R>> dirs) {
  for (auto& g : dirs) {
    if (g.nu() != base.nu())
      fail(errc::precondition_violated, "direction variable count differs from the base");
    if (g.parity() != base.parity())
      fail(errc::parity_violation, "direction parity differs from the base");
    if (!g.is_zero()) {
      if (g.order_top() > base.max_degree())
        fail(errc::precondition_violated, "direction carries terms beyond the base order");
      if (g.order_bottom() < 1)
        fail(errc::precondition_violated, "directions must vanish at the origin");
    }
    Jet<R> fitted(base.nu(), base.max_degree(), base.parity());
    for (const auto& [alpha, v] : g.coeffs()) fitted.set_coeff(alpha, v);
    g = std::move(fitted);
  }
  return {std::move(base), std::move(dirs)};
}

template <class R>
std::vector<std::vector<R>> v_seq(const DeformationJet<R>& dj, int mu_max) {
  if (mu_max < 2) fail(errc::precondition_violated, "test vectors start at subscript 2");
  if (dj.base.max_degree() < mu_max - 1)
    fail(errc::insufficient_jet, "base order too low for the requested reads");
  Envelope<R> env = envelope(dj, 1);
  std::vector<std::vector<R>> out;
  for (int m = 2; m <= mu_max; ++m) {
    std::vector<R> row;
    row.reserve(env.psi.size());
    for (const auto& p : env.psi) row.push_back(raw_partial(p, MultiIndex{m - 1}));
    out.push_back(std::move(row));
  }
  return out;
}

template <class R>
std::vector<std::vector<R>> v_e_seq(const DeformationJet<R>& dj, int mu_max) {
  if (dj.base.parity() != Parity::even)
    fail(errc::parity_violation, "even deformation required");
  if (mu_max < 2) fail(errc::precondition_violated, "test vectors start at subscript 2");
  if (dj.base.max_degree() < 2 * mu_max - 2)
    fail(errc::insufficient_jet, "base order too low for the requested reads");
  Envelope<R> env = envelope(dj, 1);
  std::vector<std::vector<R>> out;
  for (int m = 2; m <= mu_max; ++m) {
    std::vector<R> row;
    row.reserve(env.psi.size());
    for (const auto& p : env.psi) row.push_back(raw_partial(p, MultiIndex{2 * m - 2}));
    out.push_back(std::move(row));
  }
  return out;
}

template <class R>
WVectors<R> w_seq(const DeformationJet<R>& dj, int mu_max) {
  if (mu_max < 4) fail(errc::precondition_violated, "double-line test needs mu_max >= 4");
  if (dj.base.max_degree() < std::max(3, mu_max - 1))
    fail(errc::insufficient_jet, "base order too low for the requested reads");
  Envelope<R> env = envelope(dj, 2);
  Jet<R> work = env.work;
  const double wscale = conv::jet_scale(work);

  const R c = work.coeff(MultiIndex{2, 1});
  if (!zeroish(work.coeff(MultiIndex{3, 0}), wscale) ||
      !zeroish(work.coeff(MultiIndex{1, 2}), wscale))
    fail(errc::precondition_violated, "cubic part must be c*x^2*y plus at most a y^3 term");
  if (zeroish(c, wscale))
    fail(errc::precondition_violated, "x^2*y coefficient of the base vanishes");

  const int l = dj.l();
  WVectors<R> out;
  out.c = c;
  out.w.assign(static_cast<std::size_t>(mu_max), {});
  out.d.assign(static_cast<std::size_t>(mu_max), R(0));

  auto read_all = [&](const MultiIndex& a) {
    std::vector<R> row(static_cast<std::size_t>(l));
    for (int j = 0; j < l; ++j) row[static_cast<std::size_t>(j)] = raw_partial(env.psi[j], a);
    return row;
  };

  out.w[0] = read_all(MultiIndex{2, 0});
  out.w[1] = read_all(MultiIndex{1, 0});
  out.w[2] = read_all(MultiIndex{0, 1});
  out.w[3] = read_all(MultiIndex{0, 2});
  out.d[3] = raw_partial(work, MultiIndex{0, 3});

  R two_c = c;
  two_c *= R(2);
  for (int m = 5; m <= mu_max; ++m) {
    // remove the x*y^(m-2) term of the base, then read in the new frame
    R lam = work.coeff(MultiIndex{1, m - 2});
    lam /= two_c;
    lam = -lam;
    if (!(lam == R(0))) {
      auto sub = shear_subst(work.max_degree(), lam, m - 3);
      work = compose_poly(work, sub);
      for (auto& p : env.psi) p = compose_poly(p, sub);
    }
    out.d[static_cast<std::size_t>(m - 1)] = raw_partial(work, MultiIndex{0, m - 1});
    out.w[static_cast<std::size_t>(m - 1)] = read_all(MultiIndex{0, m - 2});
  }
  return out;
}

template <class R>
XeVectors<R> x_e_vec_seq(const DeformationJet<R>& dj, int mu_max, int eps, int eta) {
  if (dj.base.parity() != Parity::even)
    fail(errc::parity_violation, "even deformation required");
  if (mu_max < 5) fail(errc::precondition_violated, "doubly degenerate test starts at subscript 5");
  if (eps * eps != 1 || eta * eta != 1)
    fail(errc::precondition_violated, "eps and eta must be +-1");
  if (dj.base.max_degree() < std::max(4, 2 * mu_max - 6))
    fail(errc::insufficient_jet, "base order too low for the requested reads");
  Envelope<R> env = envelope(dj, 2);

  // the base shear coefficients read two orders beyond the base content
  Jet<R> work = lift_degree(env.work, 2 * mu_max - 4);
  const double wscale = conv::jet_scale(work);

  const R alpha = work.coeff(MultiIndex{4, 0});
  const R beta = work.coeff(MultiIndex{2, 2});
  if (!zeroish(work.coeff(MultiIndex{3, 1}), wscale) ||
      !zeroish(work.coeff(MultiIndex{1, 3}), wscale))
    fail(errc::precondition_violated, "quartic part must be diagonal with a cross term");
  if (zeroish(alpha, wscale) || sgn(alpha) != eps)
    fail(errc::adaptation_failure, "x^4 coefficient missing or of the wrong sign");
  if (zeroish(beta, wscale))
    fail(errc::adaptation_failure,
         "x^2*y^2 coefficient vanishes; the span test applies instead");
  if (sgn(beta) != eta) fail(errc::adaptation_failure, "x^2*y^2 coefficient has the wrong sign");

  const int l = dj.l();
  XeVectors<R> out;
  out.alpha = alpha;
  out.beta = beta;
  out.x.assign(static_cast<std::size_t>(mu_max), {});
  out.xs.assign(static_cast<std::size_t>(mu_max), R(0));

  auto read_all = [&](const MultiIndex& a) {
    std::vector<R> row(static_cast<std::size_t>(l));
    for (int j = 0; j < l; ++j) row[static_cast<std::size_t>(j)] = raw_partial(env.psi[j], a);
    return row;
  };

  out.x[1] = read_all(MultiIndex{2, 0});
  out.x[2] = read_all(MultiIndex{1, 1});
  out.x[3] = read_all(MultiIndex{0, 2});

  // scale-invariant combination of the two quartic reads
  std::vector<R> x1(static_cast<std::size_t>(l));
  for (int j = 0; j < l; ++j) {
    R t1 = raw_partial(env.psi[j], MultiIndex{4, 0});
    t1 /= alpha;
    R t2 = raw_partial(env.psi[j], MultiIndex{2, 2});
    t2 /= beta;
    t2 *= R(12);
    t1 -= t2;
    x1[static_cast<std::size_t>(j)] = std::move(t1);
  }
  out.x[0] = std::move(x1);

  R two_beta = beta;
  two_beta *= R(2);
  for (int m = 5; m <= mu_max; ++m) {
    // remove the x*y^(2m-6) term of the base, then read in the new frame
    R lam = work.coeff(MultiIndex{1, 2 * m - 5});
    lam /= two_beta;
    lam = -lam;
    if (!(lam == R(0))) {
      auto sub = shear_subst(work.max_degree(), lam, 2 * m - 7);
      work = compose_poly(work, sub);
      for (auto& p : env.psi) p = compose_poly(p, sub);
    }
    out.xs[static_cast<std::size_t>(m - 1)] = raw_partial(work, MultiIndex{0, 2 * m - 6});
    out.x[static_cast<std::size_t>(m - 1)] = read_all(MultiIndex{0, 2 * m - 6});
  }
  return out;
}

template <class R>
VersalityReport<R> versality_check(const DeformationJet<R>& dj, const SingularityLabel& label,
                                   double tol) {
  VersalityReport<R> rep;
  rep.min_parameters = std::max(0, label.mult - 1);
  const int l = dj.l();

  switch (label.family) {
    case Family::morse: {
      rep.verdict = Verdict::versal;
      rep.rank = 0;
      rep.reason = "non-degenerate point: nothing to unfold";
      return rep;
    }
    case Family::a:
    case Family::a_e: {
      if (label.index <= 1) {
        rep.verdict = Verdict::versal;
        rep.rank = 0;
        rep.reason = "non-degenerate point: nothing to unfold";
        return rep;
      }
      const bool even = label.family == Family::a_e;
      auto v = even ? v_e_seq(dj, label.index) : v_seq(dj, label.index);
      const std::string stem = even ? "v_e_" : "v_";
      for (int m = 2; m <= label.index; ++m) {
        rep.vectors.emplace_back(stem + std::to_string(m), v[m - 2]);
        rep.combined_test_set.emplace_back(stem + std::to_string(m), std::move(v[m - 2]));
      }
      break;
    }
    case Family::d: {
      WVectors<R> wv = w_seq(dj, label.index);
      for (int m = 1; m <= label.index; ++m)
        rep.vectors.emplace_back("w_" + std::to_string(m), wv.w[m - 1]);
      rep.combined_test_set.emplace_back("w_2", wv.w[1]);
      rep.combined_test_set.emplace_back("w_3", wv.w[2]);
      R two_c = wv.c;
      two_c *= R(2);
      for (int m = 4; m <= label.index; ++m) {
        R q = wv.d[m - 1];
        q /= two_c;
        std::vector<R> comb = wv.w[m - 1];
        R mq = q;
        mq = -mq;
        add_scaled(comb, mq, wv.w[0]);
        std::string name = "w_" + std::to_string(m);
        if (!(q == R(0))) name += " - (" + num_str(q) + ") w_1";
        rep.combined_test_set.emplace_back(std::move(name), std::move(comb));
      }
      break;
    }
    case Family::x_e: {
      // a vanishing mixed quartic coefficient has no shear frame; use the
      // local-algebra span test instead
      KernelReduction<R> kr = kernel_reduction(dj.base);
      if (kr.analysis.corank != 2)
        fail(errc::precondition_violated, "base corank does not match the label");
      const R beta = kr.reduced.coeff(MultiIndex{2, 2});
      if (zeroish(beta, conv::jet_scale(kr.reduced))) {
        VersalityReport<R> qr = quotient_route(dj, label);
        return qr;
      }
      const R alpha = kr.reduced.coeff(MultiIndex{4, 0});
      XeVectors<R> xv = x_e_vec_seq(dj, label.index, sgn(alpha), sgn(beta));
      for (int m = 1; m <= label.index; ++m)
        rep.vectors.emplace_back("x_e_" + std::to_string(m), xv.x[m - 1]);
      rep.combined_test_set.emplace_back("x_e_2", xv.x[1]);
      rep.combined_test_set.emplace_back("x_e_3", xv.x[2]);
      rep.combined_test_set.emplace_back("x_e_4", xv.x[3]);
      for (int m = 5; m <= label.index; ++m) {
        R q = xv.xs[m - 1];
        q *= R(m - 3);
        q /= R(48);
        std::vector<R> comb = xv.x[m - 1];
        add_scaled(comb, q, xv.x[0]);
        std::string name = "x_e_" + std::to_string(m);
        if (!(q == R(0))) name += " + (" + num_str(q) + ") x_e_1";
        rep.combined_test_set.emplace_back(std::move(name), std::move(comb));
      }
      break;
    }
    default:
      fail(errc::unsupported_label,
           "no versality test for class " + family_name(label.family));
  }

  finish_report(rep, l, tol);
  return rep;
}

DeformationJet<Rat> build_versal_deformation(const SingularityLabel& label, int nu) {
  auto sign_or_plus = [](int s) { return s < 0 ? Rat(-1) : Rat(1); };
  auto monomial = [&](int n, Parity par, std::initializer_list<std::pair<int, int>> powers) {
    JetQ m(nu, n, par);
    MultiIndex a(static_cast<std::size_t>(nu));
    for (auto [var, p] : powers) a[static_cast<std::size_t>(var)] = p;
    m.set_coeff(a, Rat(1));
    return m;
  };
  auto stabilize = [&](JetQ& base, int from) {
    for (int i = from; i < nu; ++i) {
      MultiIndex a(static_cast<std::size_t>(nu));
      a[static_cast<std::size_t>(i)] = 2;
      base.set_coeff(a, Rat(1));
    }
  };

  switch (label.family) {
    case Family::morse: {
      if (nu < 1) fail(errc::precondition_violated, "need at least one variable");
      JetQ base(nu, 2);
      stabilize(base, 0);
      return {std::move(base), {}};
    }
    case Family::a: {
      const int mu = label.index;
      if (mu < 2) fail(errc::precondition_violated, "index must be at least 2");
      if (nu < 1) fail(errc::precondition_violated, "need at least one variable");
      const int n = mu + 1;
      JetQ base(nu, n);
      MultiIndex top(static_cast<std::size_t>(nu));
      top[0] = mu + 1;
      base.set_coeff(top, sign_or_plus(label.sign1));
      stabilize(base, 1);
      std::vector<JetQ> dirs;
      for (int m = 1; m <= mu - 1; ++m) dirs.push_back(monomial(n, Parity::general, {{0, m}}));
      return make_deformation(std::move(base), std::move(dirs));
    }
    case Family::a_e: {
      const int mu = label.index;
      if (mu < 1) fail(errc::precondition_violated, "index must be at least 1");
      if (nu < 1) fail(errc::precondition_violated, "need at least one variable");
      const int n = std::max(2, 2 * mu);
      JetQ base(nu, n, Parity::even);
      MultiIndex top(static_cast<std::size_t>(nu));
      top[0] = 2 * mu;
      base.set_coeff(top, sign_or_plus(label.sign1));
      stabilize(base, 1);
      std::vector<JetQ> dirs;
      for (int m = 1; m <= mu - 1; ++m) dirs.push_back(monomial(n, Parity::even, {{0, 2 * m}}));
      return make_deformation(std::move(base), std::move(dirs));
    }
    case Family::d: {
      const int mu = label.index;
      if (mu < 4) fail(errc::precondition_violated, "index must be at least 4");
      if (nu < 2) fail(errc::precondition_violated, "need at least two variables");
      const int n = std::max(3, mu - 1);
      JetQ base(nu, n);
      MultiIndex xxy(static_cast<std::size_t>(nu));
      xxy[0] = 2;
      xxy[1] = 1;
      base.set_coeff(xxy, Rat(1));
      MultiIndex yt(static_cast<std::size_t>(nu));
      yt[1] = mu - 1;
      base.set_coeff(yt, sign_or_plus(label.sign1));
      stabilize(base, 2);
      std::vector<JetQ> dirs;
      dirs.push_back(monomial(n, Parity::general, {{0, 1}}));
      dirs.push_back(monomial(n, Parity::general, {{0, 2}}));
      for (int m = 1; m <= mu - 3; ++m) dirs.push_back(monomial(n, Parity::general, {{1, m}}));
      return make_deformation(std::move(base), std::move(dirs));
    }
    case Family::x_e: {
      const int mu = label.index;
      if (mu < 5) fail(errc::precondition_violated, "index must be at least 5");
      if (nu < 2) fail(errc::precondition_violated, "need at least two variables");
      if (!label.has_modulus)
        fail(errc::precondition_violated, "label carries no modulus value");
      Rat a = label.modulus.exact ? label.modulus.exact_value : Rat(label.modulus.value);
      const int n = std::max(4, 2 * mu - 6);
      JetQ base(nu, n, Parity::even);
      MultiIndex x4(static_cast<std::size_t>(nu));
      x4[0] = 4;
      base.set_coeff(x4, sign_or_plus(label.sign1));
      MultiIndex cross(static_cast<std::size_t>(nu));
      cross[0] = 2;
      cross[1] = 2;
      MultiIndex ytop(static_cast<std::size_t>(nu));
      ytop[1] = mu == 5 ? 4 : 2 * mu - 6;
      if (mu == 5) {
        if (a != 0) base.set_coeff(cross, a);
        base.set_coeff(ytop, sign_or_plus(label.sign2));
      } else {
        if (a == 0)
          fail(errc::precondition_violated, "higher class needs a nonzero top coefficient");
        base.set_coeff(cross, sign_or_plus(label.sign2));
        base.set_coeff(ytop, a);
      }
      stabilize(base, 2);
      std::vector<JetQ> dirs;
      dirs.push_back(monomial(n, Parity::even, {{0, 2}}));
      dirs.push_back(monomial(n, Parity::even, {{0, 1}, {1, 1}}));
      dirs.push_back(monomial(n, Parity::even, {{1, 2}}));
      if (mu == 5) {
        dirs.push_back(monomial(n, Parity::even, {{0, 2}, {1, 2}}));
      } else {
        dirs.push_back(monomial(n, Parity::even, {{0, 4}}));
        for (int r = 2; r <= mu - 4; ++r)
          dirs.push_back(monomial(n, Parity::even, {{1, 2 * r}}));
      }
      return make_deformation(std::move(base), std::move(dirs));
    }
    default:
      fail(errc::unsupported_label,
           "no catalogue versal family for class " + family_name(label.family));
  }
}

template struct DeformationJet<Rat>;
template struct DeformationJet<double>;
template DeformationJet<Rat> make_deformation(JetQ, std::vector<JetQ>);
template DeformationJet<double> make_deformation(JetD, std::vector<JetD>);
template std::vector<std::vector<Rat>> v_seq(const DeformationJet<Rat>&, int);
template std::vector<std::vector<double>> v_seq(const DeformationJet<double>&, int);
template std::vector<std::vector<Rat>> v_e_seq(const DeformationJet<Rat>&, int);
template std::vector<std::vector<double>> v_e_seq(const DeformationJet<double>&, int);
template WVectors<Rat> w_seq(const DeformationJet<Rat>&, int);
template WVectors<double> w_seq(const DeformationJet<double>&, int);
template XeVectors<Rat> x_e_vec_seq(const DeformationJet<Rat>&, int, int, int);
template XeVectors<double> x_e_vec_seq(const DeformationJet<double>&, int, int, int);
template VersalityReport<Rat> versality_check(const DeformationJet<Rat>&, const SingularityLabel&,
                                              double);
template VersalityReport<double> versality_check(const DeformationJet<double>&,
                                                 const SingularityLabel&, double);

}  // namespace germlab
