#include "germlab/caustic.hpp"

#include "germlab/detect.hpp"
#include "germlab/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace germlab {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr int max_vars = 4;

double wrap_angle(double x) {
  double y = std::fmod(x, two_pi);
  if (y < 0) y += two_pi;
  return y;
}

double coord_dist(double a, double b, Domain d) {
  double s = std::abs(a - b);
  if (d == Domain::torus) s = std::min(s, two_pi - s);
  return s;
}

double point_dist(const std::vector<double>& a, const std::vector<double>& b, Domain d) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double c = coord_dist(a[i], b[i], d);
    s += c * c;
  }
  return std::sqrt(s);
}

std::vector<double> reflect(const std::vector<double>& k, Domain d) {
  std::vector<double> r(k.size());
  for (std::size_t i = 0; i < k.size(); ++i)
    r[i] = d == Domain::torus ? wrap_angle(-k[i]) : -k[i];
  return r;
}

// One parameter value of the family, with derivative access. The jet backend
// differentiates the polynomial once and evaluates; the value backend falls
// back to central differences.
struct Model {
  const FamilySpec* spec = nullptr;
  std::vector<double> lambda;
  bool from_jet = false;
  JetD f{1, 0};
  std::vector<JetD> grad;
  std::vector<JetD> hess;  // row-major nu x nu
  double scale = 1.0;
};

double eval_jet_at(const JetD& f, const double* k) {
  double pw[max_vars][64];
  const int nu = f.nu();
  const int top = f.max_degree();
  for (int v = 0; v < nu; ++v) {
    pw[v][0] = 1.0;
    for (int e = 1; e <= top; ++e) pw[v][e] = pw[v][e - 1] * k[v];
  }
  double out = 0.0;
  for (const auto& [alpha, c] : f.coeffs()) {
    double t = c;
    for (int v = 0; v < nu; ++v) t *= pw[v][alpha[static_cast<std::size_t>(v)]];
    out += t;
  }
  return out;
}

Model realize(const FamilySpec& spec, const std::vector<double>& lambda) {
  if (spec.nu < 1 || spec.nu > max_vars)
    fail(errc::precondition_violated, "variable count out of range");
  if (static_cast<int>(lambda.size()) != spec.n_params)
    fail(errc::precondition_violated, "parameter vector length does not match the family");
  Model m;
  m.spec = &spec;
  m.lambda = lambda;
  if (spec.polynomial) {
    m.from_jet = true;
    m.f = spec.polynomial(lambda);
    if (m.f.nu() != spec.nu)
      fail(errc::precondition_violated, "family jet variable count mismatch");
    if (m.f.max_degree() > 30)
      fail(errc::precondition_violated, "family degree out of range");
    for (int i = 0; i < spec.nu; ++i)
      m.grad.push_back(derivative(m.f, static_cast<std::size_t>(i)));
    for (int i = 0; i < spec.nu; ++i)
      for (int j = 0; j < spec.nu; ++j)
        m.hess.push_back(derivative(m.grad[static_cast<std::size_t>(i)],
                                    static_cast<std::size_t>(j)));
    double s = 0;
    for (const auto& [alpha, c] : m.f.coeffs()) s = std::max(s, std::abs(c));
    m.scale = std::max(1.0, s);
  } else if (spec.value) {
    std::vector<double> k(static_cast<std::size_t>(spec.nu), 0.0);
    double s = std::abs(spec.value(k, lambda));
    for (int v = 0; v < spec.nu; ++v) {
      k[static_cast<std::size_t>(v)] = spec.domain == Domain::torus ? std::numbers::pi : 1.0;
      s = std::max(s, std::abs(spec.value(k, lambda)));
    }
    m.scale = std::max(1.0, s);
  } else {
    fail(errc::precondition_violated, "family has neither a jet nor an evaluator");
  }
  return m;
}

double value_at(const Model& m, const std::vector<double>& k) {
  if (m.from_jet) return eval_jet_at(m.f, k.data());
  return m.spec->value(k, m.lambda);
}

void grad_at(const Model& m, const std::vector<double>& k, double* g) {
  const int nu = m.spec->nu;
  if (m.from_jet) {
    for (int i = 0; i < nu; ++i) g[i] = eval_jet_at(m.grad[static_cast<std::size_t>(i)], k.data());
    return;
  }
  const double h = 1e-6;
  std::vector<double> p = k;
  for (int i = 0; i < nu; ++i) {
    const double ki = k[static_cast<std::size_t>(i)];
    p[static_cast<std::size_t>(i)] = ki + h;
    const double fp = m.spec->value(p, m.lambda);
    p[static_cast<std::size_t>(i)] = ki - h;
    const double fm = m.spec->value(p, m.lambda);
    p[static_cast<std::size_t>(i)] = ki;
    g[i] = (fp - fm) / (2 * h);
  }
}

void hess_at(const Model& m, const std::vector<double>& k, double* h) {
  const int nu = m.spec->nu;
  if (m.from_jet) {
    for (int i = 0; i < nu; ++i)
      for (int j = 0; j < nu; ++j)
        h[i * nu + j] = eval_jet_at(m.hess[static_cast<std::size_t>(i * nu + j)], k.data());
    return;
  }
  const double s = 1e-4;
  std::vector<double> p = k;
  const double f0 = m.spec->value(p, m.lambda);
  for (int i = 0; i < nu; ++i) {
    const double ki = k[static_cast<std::size_t>(i)];
    p[static_cast<std::size_t>(i)] = ki + s;
    const double fp = m.spec->value(p, m.lambda);
    p[static_cast<std::size_t>(i)] = ki - s;
    const double fm = m.spec->value(p, m.lambda);
    p[static_cast<std::size_t>(i)] = ki;
    h[i * nu + i] = (fp + fm - 2 * f0) / (s * s);
    for (int j = i + 1; j < nu; ++j) {
      const double kj = k[static_cast<std::size_t>(j)];
      double q[4];
      int t = 0;
      for (int si = -1; si <= 1; si += 2)
        for (int sj = -1; sj <= 1; sj += 2) {
          p[static_cast<std::size_t>(i)] = ki + si * s;
          p[static_cast<std::size_t>(j)] = kj + sj * s;
          q[t++] = m.spec->value(p, m.lambda);
        }
      p[static_cast<std::size_t>(i)] = ki;
      p[static_cast<std::size_t>(j)] = kj;
      const double v = (q[3] - q[2] - q[1] + q[0]) / (4 * s * s);
      h[i * nu + j] = v;
      h[j * nu + i] = v;
    }
  }
}

double det_n(const double* h, int n) {
  switch (n) {
    case 1:
      return h[0];
    case 2:
      return h[0] * h[3] - h[1] * h[2];
    case 3:
      return h[0] * (h[4] * h[8] - h[5] * h[7]) - h[1] * (h[3] * h[8] - h[5] * h[6]) +
             h[2] * (h[3] * h[7] - h[4] * h[6]);
    default: {
      Eigen::MatrixXd m(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = h[i * n + j];
      return m.determinant();
    }
  }
}

double norm_n(const double* g, int n) {
  double s = 0;
  for (int i = 0; i < n; ++i) s += g[i] * g[i];
  return std::sqrt(s);
}

// In-place Gaussian elimination with partial pivoting; false on a pivot that
// underflows to zero.
bool solve_n(double* a, double* b, int n) {
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (a[piv * n + c] == 0.0 || !std::isfinite(a[piv * n + c])) return false;
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(a[c * n + j], a[piv * n + j]);
      std::swap(b[c], b[piv]);
    }
    for (int r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      for (int j = c; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
      b[r] -= f * b[c];
    }
  }
  for (int c = n - 1; c >= 0; --c) {
    double s = b[c];
    for (int j = c + 1; j < n; ++j) s -= a[c * n + j] * b[j];
    b[c] = s / a[c * n + c];
    if (!std::isfinite(b[c])) return false;
  }
  return true;
}

std::optional<std::vector<double>> newton(const Model& m, std::vector<double> k, double tol,
                                          double step_cap) {
  const int nu = m.spec->nu;
  double g[max_vars], h[max_vars * max_vars], d[max_vars];
  std::vector<double> k2(k.size());
  grad_at(m, k, g);
  double res = norm_n(g, nu);
  const double goal = tol * m.scale;
  for (int it = 0; it < m.spec->newton_max_iters; ++it) {
    if (res <= goal) return k;
    hess_at(m, k, h);
    for (int i = 0; i < nu; ++i) d[i] = -g[i];
    if (!solve_n(h, d, nu)) return std::nullopt;
    double len = norm_n(d, nu);
    if (!std::isfinite(len)) return std::nullopt;
    if (len > step_cap)
      for (int i = 0; i < nu; ++i) d[i] *= step_cap / len;
    double alpha = 1.0;
    bool moved = false;
    for (int half = 0; half < 30; ++half) {
      for (int i = 0; i < nu; ++i)
        k2[static_cast<std::size_t>(i)] = k[static_cast<std::size_t>(i)] + alpha * d[i];
      double g2[max_vars];
      grad_at(m, k2, g2);
      const double res2 = norm_n(g2, nu);
      if (res2 < res || res2 <= goal) {
        k = k2;
        for (int i = 0; i < nu; ++i) g[i] = g2[i];
        res = res2;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
  }
  if (res <= goal) return k;
  return std::nullopt;
}

// Real roots of sum c[e] k^e, ascending, by companion matrix eigenvalues.
std::vector<double> poly_real_roots(const std::vector<double>& c) {
  int d = static_cast<int>(c.size()) - 1;
  while (d > 0 && c[static_cast<std::size_t>(d)] == 0.0) --d;
  std::vector<double> out;
  if (d <= 0) return out;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
  for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i)
    comp(i, d - 1) = -c[static_cast<std::size_t>(i)] / c[static_cast<std::size_t>(d)];
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
  for (int i = 0; i < d; ++i) {
    const auto z = es.eigenvalues()[i];
    if (std::abs(z.imag()) <= 1e-7 * (1.0 + std::abs(z.real()))) out.push_back(z.real());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<double>> basic_lattice(const FamilySpec& spec) {
  std::vector<std::vector<double>> out;
  const std::size_t nu = static_cast<std::size_t>(spec.nu);
  if (spec.domain == Domain::box) {
    out.emplace_back(nu, 0.0);
    return out;
  }
  const int total = 1 << spec.nu;
  for (int mask = 0; mask < total; ++mask) {
    std::vector<double> p(nu, 0.0);
    for (int v = 0; v < spec.nu; ++v)
      if (mask & (1 << v)) p[static_cast<std::size_t>(v)] = std::numbers::pi;
    out.push_back(std::move(p));
  }
  return out;
}

void window(const FamilySpec& spec, std::vector<double>& lo, std::vector<double>& hi) {
  const std::size_t nu = static_cast<std::size_t>(spec.nu);
  lo.assign(nu, -2.5);
  hi.assign(nu, 2.5);
  if (spec.k_lo.size() == nu && spec.k_hi.size() == nu) {
    lo = spec.k_lo;
    hi = spec.k_hi;
  }
}

int morse_index(const double* h, int nu) {
  Eigen::MatrixXd m(nu, nu);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nu; ++j) m(i, j) = h[i * nu + j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  int idx = 0;
  for (int i = 0; i < nu; ++i)
    if (es.eigenvalues()[i] < 0) ++idx;
  return idx;
}

// f(k + c) as an exact polynomial identity; general parity unless c = 0.
JetD shift_poly(const JetD& f, const std::vector<double>& c) {
  bool zero = true;
  for (double x : c) zero = zero && x == 0.0;
  if (zero) return f;
  const int nu = f.nu();
  const int top = f.max_degree();
  double binom[24][24];
  for (int n = 0; n <= top; ++n) {
    binom[n][0] = 1.0;
    for (int r = 1; r <= n; ++r)
      binom[n][r] = binom[n - 1][r - 1] + (r <= n - 1 ? binom[n - 1][r] : 0.0);
  }
  std::map<MultiIndex, double> acc;
  for (const auto& [alpha, coef] : f.coeffs()) {
    // enumerate beta <= alpha coordinate-wise
    std::vector<int> b(static_cast<std::size_t>(nu), 0);
    while (true) {
      double w = coef;
      for (int v = 0; v < nu; ++v) {
        const int av = alpha[static_cast<std::size_t>(v)];
        const int bv = b[static_cast<std::size_t>(v)];
        w *= binom[av][bv] * std::pow(c[static_cast<std::size_t>(v)], av - bv);
      }
      if (w != 0.0) {
        MultiIndex mi(b);
        acc[mi] += w;
      }
      int v = 0;
      while (v < nu) {
        if (b[static_cast<std::size_t>(v)] < alpha[static_cast<std::size_t>(v)]) {
          ++b[static_cast<std::size_t>(v)];
          break;
        }
        b[static_cast<std::size_t>(v)] = 0;
        ++v;
      }
      if (v == nu) break;
    }
  }
  std::vector<std::pair<MultiIndex, double>> entries;
  for (auto& [mi, w] : acc)
    if (w != 0.0) entries.emplace_back(mi, w);
  return jet_from_coeffs(nu, top, entries, Parity::general);
}

// Local germ at a critical point: shifted, constant and linear parts
// dropped, Hessian kernel aligned so the snap inside classify sees the
// degeneracy instead of a full-rank matrix of cancelling entries.
SingularityLabel label_local(const Model& m, const std::vector<double>& k, double class_tol) {
  const FamilySpec& spec = *m.spec;
  JetD local{1, 0};
  if (m.from_jet) {
    local = shift_poly(m.f, k);
  } else {
    std::vector<double> base = k;
    Parity p = Parity::general;
    if (spec.parity == Parity::even && spec.domain == Domain::torus) {
      bool lattice = true;
      for (double x : base) lattice = lattice && (x == 0.0 || x == std::numbers::pi);
      if (lattice) p = Parity::even;
    }
    Evaluator ev = [&m, &base, &spec](const std::vector<double>& dk) {
      std::vector<double> q(base.size());
      for (std::size_t i = 0; i < base.size(); ++i) q[i] = base[i] + dk[i];
      return spec.value(q, m.lambda);
    };
    local = finite_difference_jet(ev, spec.nu, spec.fd_degree, 1e-2, p);
  }
  MultiIndex zero(static_cast<std::size_t>(local.nu()));
  local.set_coeff(zero, 0.0);
  if (local.parity() == Parity::general && local.max_degree() >= 1) {
    for (int v = 0; v < local.nu(); ++v) {
      MultiIndex e(static_cast<std::size_t>(local.nu()));
      e[static_cast<std::size_t>(v)] = 1;
      local.set_coeff(e, 0.0);
    }
  }
  if (local.nu() >= 2) {
    const auto ha = hessian_analysis(local, 1e-6);
    if (ha.corank > 0 && ha.corank < local.nu()) local = align_kernel(local, ha);
  }
  ClassifyOptions opts;
  opts.tol = class_tol;
  return classify(local, opts);
}

struct Candidate {
  std::vector<double> k;
  double grad_norm = 0.0;
};

int kind_rank(PointKind k) {
  switch (k) {
    case PointKind::basic: return 0;
    case PointKind::twin: return 1;
    case PointKind::plain: return 2;
  }
  return 2;
}

void measure(const Model& m, CriticalPoint& p) {
  const int nu = m.spec->nu;
  double h[max_vars * max_vars];
  hess_at(m, p.k, h);
  p.value = value_at(m, p.k);
  p.det_hessian = det_n(h, nu);
  p.morse_index = morse_index(h, nu);
}

std::vector<CriticalPoint> find_points_impl(const Model& m, const FindOptions& opts) {
  const FamilySpec& spec = *m.spec;
  const std::size_t nu = static_cast<std::size_t>(spec.nu);
  const double tol = spec.newton_tol > 0 ? spec.newton_tol : (m.from_jet ? 1e-12 : 1e-9);

  std::vector<double> lo, hi;
  window(spec, lo, hi);
  double span = 0;
  for (std::size_t v = 0; v < nu; ++v) span = std::max(span, hi[v] - lo[v]);
  if (spec.domain == Domain::torus) span = two_pi;
  const double step_cap = span;

  auto keep_candidate = [&](std::vector<double> k, std::vector<Candidate>& kept) {
    if (spec.domain == Domain::torus) {
      for (auto& x : k) x = wrap_angle(x);
    } else {
      for (std::size_t v = 0; v < nu; ++v) {
        const double margin = 0.25 * (hi[v] - lo[v]);
        if (k[v] < lo[v] - margin || k[v] > hi[v] + margin) return;
      }
    }
    double g[max_vars];
    grad_at(m, k, g);
    Candidate c{std::move(k), norm_n(g, spec.nu)};
    for (auto& other : kept) {
      if (point_dist(other.k, c.k, spec.domain) <= spec.dedupe_tol) {
        if (c.grad_norm < other.grad_norm) other = c;
        return;
      }
    }
    kept.push_back(std::move(c));
  };

  std::vector<Candidate> kept;
  if (m.from_jet && spec.nu == 1) {
    // one variable: the gradient is a plain polynomial, every real root of
    // which is found at once; no multistart coverage gap possible
    const JetD& g1 = m.grad[0];
    std::vector<double> c(static_cast<std::size_t>(g1.max_degree()) + 1, 0.0);
    for (const auto& [alpha, v] : g1.coeffs()) c[static_cast<std::size_t>(alpha[0])] = v;
    for (double r : poly_real_roots(c)) {
      // polish the eigenvalue root on the exact polynomial
      std::vector<double> k{r};
      for (int it = 0; it < 3; ++it) {
        double gv[max_vars], hv[max_vars * max_vars];
        grad_at(m, k, gv);
        hess_at(m, k, hv);
        if (hv[0] == 0.0) break;
        const double step = gv[0] / hv[0];
        if (!std::isfinite(step)) break;
        k[0] -= step;
      }
      keep_candidate(std::move(k), kept);
    }
    if (spec.parity == Parity::even)
      for (auto& b : basic_lattice(spec)) keep_candidate(std::move(b), kept);
  } else {
    std::vector<std::vector<double>> seeds;
    for (const auto& w : opts.warm_starts)
      if (w.size() == nu) seeds.push_back(w);
    for (auto& b : basic_lattice(spec)) seeds.push_back(std::move(b));
    if (opts.seed_grid) {
      const int s = spec.seeds_per_axis > 0 ? spec.seeds_per_axis
                                            : (spec.nu == 1 ? 12 : spec.nu == 2 ? 8 : 5);
      std::vector<int> idx(nu, 0);
      while (true) {
        std::vector<double> p(nu);
        for (std::size_t v = 0; v < nu; ++v) {
          if (spec.domain == Domain::torus)
            p[v] = (idx[v] + 0.5) * two_pi / s;
          else
            p[v] = lo[v] + (idx[v] + 0.5) * (hi[v] - lo[v]) / s;
        }
        seeds.push_back(std::move(p));
        std::size_t v = 0;
        while (v < nu) {
          if (++idx[v] < s) break;
          idx[v] = 0;
          ++v;
        }
        if (v == nu) break;
      }
    }
    for (const auto& seed : seeds) {
      auto r = newton(m, seed, tol, step_cap);
      if (!r) continue;  // a diverging seed is dropped, never an error
      keep_candidate(std::move(*r), kept);
    }
  }

  std::vector<CriticalPoint> out;
  const bool even = spec.parity == Parity::even;
  for (auto& c : kept) {
    CriticalPoint p;
    p.k = std::move(c.k);
    p.grad_norm = c.grad_norm;
    p.kind = PointKind::plain;
    if (even) {
      bool lattice = true;
      std::vector<double> snapped(nu);
      for (std::size_t v = 0; v < nu; ++v) {
        if (spec.domain == Domain::torus) {
          const double x = p.k[v];
          if (coord_dist(x, 0.0, Domain::torus) <= spec.dedupe_tol)
            snapped[v] = 0.0;
          else if (std::abs(x - std::numbers::pi) <= spec.dedupe_tol)
            snapped[v] = std::numbers::pi;
          else
            lattice = false;
        } else {
          if (std::abs(p.k[v]) <= spec.dedupe_tol)
            snapped[v] = 0.0;
          else
            lattice = false;
        }
      }
      if (lattice) {
        p.k = std::move(snapped);
        p.kind = PointKind::basic;
      } else {
        p.kind = PointKind::twin;
      }
    }
    out.push_back(std::move(p));
  }

  if (even) {
    // the symmetry guarantees the mirror point with identical invariants
    const std::size_t n0 = out.size();
    for (std::size_t i = 0; i < n0; ++i) {
      if (out[i].kind != PointKind::twin) continue;
      const auto anti = reflect(out[i].k, spec.domain);
      bool found = false;
      for (const auto& q : out)
        found = found || point_dist(q.k, anti, spec.domain) <= spec.dedupe_tol;
      if (!found) {
        CriticalPoint p;
        p.k = anti;
        p.kind = PointKind::twin;
        p.grad_norm = out[i].grad_norm;
        out.push_back(std::move(p));
      }
    }
  }

  for (auto& p : out) measure(m, p);

  std::sort(out.begin(), out.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    const int ra = kind_rank(a.kind), rb = kind_rank(b.kind);
    if (ra != rb) return ra < rb;
    return a.k < b.k;
  });
  return out;
}

// Multiset of (kind, Morse index) per point: the comparable census key. Any
// fold, any index flip, any appearance changes it.
using Signature = std::vector<std::pair<int, int>>;

Signature signature_of(const std::vector<CriticalPoint>& pts) {
  Signature s;
  s.reserve(pts.size());
  for (const auto& p : pts) s.emplace_back(kind_rank(p.kind), p.morse_index);
  std::sort(s.begin(), s.end());
  return s;
}

CensusCount census_of(const std::vector<CriticalPoint>& pts) {
  CensusCount c;
  int twins = 0;
  for (const auto& p : pts) {
    switch (p.kind) {
      case PointKind::basic:
        ++c.basic;
        ++c.basic_by_morse_index[p.morse_index];
        break;
      case PointKind::twin:
        ++twins;
        break;
      case PointKind::plain:
        ++c.plain;
        break;
    }
  }
  c.twin_pairs = twins / 2;
  return c;
}

bool elementary_step(const Signature& a, const Signature& b) {
  Signature rem, add;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(rem));
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(add));
  if (rem.size() + add.size() <= 2) return true;
  // twins move in antipodal pairs, so any purely-twin change with even
  // entry counts is one geometric event (pairs appearing, vanishing, or
  // flipping index together)
  const int tw = kind_rank(PointKind::twin);
  auto twin_even = [tw](const Signature& s) {
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i].first != tw) return false;
    std::size_t i = 0;
    while (i < s.size()) {
      std::size_t j = i;
      while (j < s.size() && s[j] == s[i]) ++j;
      if ((j - i) % 2 != 0) return false;
      i = j;
    }
    return true;
  };
  return twin_even(rem) && twin_even(add);
}

int thread_count() {
  if (const char* s = std::getenv("GERMLAB_THREADS")) {
    const int v = std::atoi(s);
    if (v >= 1) return std::min(v, 64);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(std::min(hc, 16u)) : 4;
}

template <class Fn>
void parallel_for(int n, Fn fn) {
  const int t = std::min(thread_count(), n);
  if (t <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::mutex mu;
  std::exception_ptr err;
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += t) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

struct NodeState {
  std::vector<CriticalPoint> pts;
  Signature sig;
};

NodeState state_at(const FamilySpec& spec, const std::vector<double>& lam,
                   const std::vector<CriticalPoint>* warm_a,
                   const std::vector<CriticalPoint>* warm_b, bool seed_grid) {
  FindOptions o;
  o.seed_grid = seed_grid;
  if (warm_a)
    for (const auto& p : *warm_a) o.warm_starts.push_back(p.k);
  if (warm_b)
    for (const auto& p : *warm_b) o.warm_starts.push_back(p.k);
  NodeState s;
  s.pts = find_critical_points(spec, lam, o);
  s.sig = signature_of(s.pts);
  return s;
}

struct EdgeJob {
  std::vector<double> lam_u, lam_v;
  const NodeState* su = nullptr;
  const NodeState* sv = nullptr;
  int axis = 0;
  std::vector<int> node;
};

double det_of(const Model& m, const std::vector<double>& k) {
  double h[max_vars * max_vars];
  hess_at(m, k, h);
  return det_n(h, m.spec->nu);
}

struct Polished {
  std::vector<double> k;
  double t = 0.0;
  double det = 0.0;
  bool ok = false;
};

// Drives the degeneracy itself to zero along the edge line. Bisection
// leaves |det| about the square root of the parameter tolerance at fold
// points; a few Newton steps on the joint system recover it fully.
Polished polish_crossing(const FamilySpec& spec, const std::vector<double>& lam_u,
                         const std::vector<double>& lam_v, double t0,
                         const std::vector<double>& k0, bool pinned) {
  const int nu = spec.nu;
  auto lam = [&](double t) {
    std::vector<double> l(lam_u.size());
    for (std::size_t i = 0; i < l.size(); ++i) l[i] = lam_u[i] + t * (lam_v[i] - lam_u[i]);
    return l;
  };
  Polished out;
  out.k = k0;
  out.t = t0;
  std::vector<double> k = k0;
  double t = t0;
  const double th = 1e-7;
  const bool exact = static_cast<bool>(spec.polynomial);
  const double det_goal = exact ? 1e-12 : 1e-6;
  const double grad_goal = exact ? 1e-10 : 1e-6;

  if (pinned) {
    // a symmetry-pinned point keeps its position; only the parameter moves
    for (int it = 0; it < 40; ++it) {
      Model mm = realize(spec, lam(t));
      const double f = det_of(mm, k);
      if (std::abs(f) <= det_goal * mm.scale) break;
      Model mp = realize(spec, lam(t + th));
      Model mn = realize(spec, lam(t - th));
      const double d = (det_of(mp, k) - det_of(mn, k)) / (2 * th);
      if (d == 0.0 || !std::isfinite(d)) return out;
      t -= f / d;
      if (!(t > -0.5 && t < 1.5)) return out;
    }
    Model mm = realize(spec, lam(t));
    out.k = k;
    out.t = t;
    out.det = det_of(mm, k);
    out.ok = std::isfinite(out.det);
    return out;
  }

  for (int it = 0; it < 25; ++it) {
    Model mm = realize(spec, lam(t));
    double g[max_vars];
    grad_at(mm, k, g);
    const double dd = det_of(mm, k);
    double rn = std::abs(dd);
    for (int i = 0; i < nu; ++i) rn = std::max(rn, std::abs(g[i]));
    if (rn <= det_goal * mm.scale) break;

    const int n = nu + 1;
    double J[(max_vars + 1) * (max_vars + 1)];
    double r[max_vars + 1];
    double h[max_vars * max_vars];
    hess_at(mm, k, h);
    for (int i = 0; i < nu; ++i) {
      for (int j = 0; j < nu; ++j) J[i * n + j] = h[i * nu + j];
      r[i] = g[i];
    }
    const double kh = 1e-6;
    std::vector<double> kk = k;
    for (int j = 0; j < nu; ++j) {
      const double kj = k[static_cast<std::size_t>(j)];
      kk[static_cast<std::size_t>(j)] = kj + kh;
      const double dp = det_of(mm, kk);
      kk[static_cast<std::size_t>(j)] = kj - kh;
      const double dn = det_of(mm, kk);
      kk[static_cast<std::size_t>(j)] = kj;
      J[nu * n + j] = (dp - dn) / (2 * kh);
    }
    r[nu] = dd;
    Model mp = realize(spec, lam(t + th));
    Model mn = realize(spec, lam(t - th));
    double gp[max_vars], gn[max_vars];
    grad_at(mp, k, gp);
    grad_at(mn, k, gn);
    for (int i = 0; i < nu; ++i) J[i * n + nu] = (gp[i] - gn[i]) / (2 * th);
    J[nu * n + nu] = (det_of(mp, k) - det_of(mn, k)) / (2 * th);

    double step[max_vars + 1];
    for (int i = 0; i < n; ++i) step[i] = -r[i];
    if (!solve_n(J, step, n)) return out;
    for (int i = 0; i < nu; ++i) k[static_cast<std::size_t>(i)] += step[i];
    t += step[nu];
    if (!(t > -0.5 && t < 1.5)) return out;
    for (double x : k)
      if (!std::isfinite(x)) return out;
  }

  Model mm = realize(spec, lam(t));
  double g[max_vars];
  grad_at(mm, k, g);
  if (norm_n(g, nu) > grad_goal * mm.scale) return out;
  out.k = k;
  out.t = t;
  out.det = det_of(mm, k);
  out.ok = std::isfinite(out.det);
  return out;
}

void scan_edge(const FamilySpec& spec, const EdgeJob& job, double lambda_tol, double class_tol,
               std::vector<CrossingPoint>& out) {
  auto lam = [&job](double t) {
    std::vector<double> l(job.lam_u.size());
    for (std::size_t i = 0; i < l.size(); ++i)
      l[i] = job.lam_u[i] + t * (job.lam_v[i] - job.lam_u[i]);
    return l;
  };
  double edge_len = 0;
  for (std::size_t i = 0; i < job.lam_u.size(); ++i)
    edge_len = std::max(edge_len, std::abs(job.lam_v[i] - job.lam_u[i]));

  double a = 0.0, b = 1.0;
  NodeState sa = *job.su;
  const NodeState* tail = job.sv;
  int guard = 0;
  while (sa.sig != tail->sig && guard++ < 6) {
    double lo = a, hi = b;
    NodeState slo = sa;
    NodeState shi = *tail;
    while ((hi - lo) * edge_len > lambda_tol) {
      const double mid = 0.5 * (lo + hi);
      NodeState sm = state_at(spec, lam(mid), &slo.pts, &shi.pts, false);
      if (sm.sig == slo.sig) {
        lo = mid;
        slo = std::move(sm);
      } else {
        hi = mid;
        shi = std::move(sm);
      }
    }
    const double tstar = 0.5 * (lo + hi);
    CrossingPoint cp;
    cp.lambda = lam(tstar);
    cp.axis = job.axis;
    cp.node = job.node;
    cp.ambiguous = !elementary_step(slo.sig, shi.sig);

    Model m = realize(spec, cp.lambda);
    FindOptions o;
    o.seed_grid = false;
    for (const auto& p : slo.pts) o.warm_starts.push_back(p.k);
    for (const auto& p : shi.pts) o.warm_starts.push_back(p.k);
    auto pts = find_points_impl(m, o);
    // points that merge and vanish at the crossing exist on only one side of
    // the bracket, so both endpoint states join the candidate pool
    std::vector<CriticalPoint> pool = std::move(pts);
    for (const auto* side : {&slo.pts, &shi.pts})
      for (const auto& p : *side) {
        CriticalPoint q;
        q.k = p.k;
        q.kind = p.kind;
        measure(m, q);
        pool.push_back(std::move(q));
      }
    if (!pool.empty()) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < pool.size(); ++i)
        if (std::abs(pool[i].det_hessian) < std::abs(pool[best].det_hessian)) best = i;
      cp.k = pool[best].k;
      cp.residual = std::abs(pool[best].det_hessian);
      Polished ref = polish_crossing(spec, job.lam_u, job.lam_v, tstar, cp.k,
                                     pool[best].kind == PointKind::basic);
      if (ref.ok && std::abs(ref.det) <= cp.residual) {
        cp.k = ref.k;
        cp.lambda = lam(ref.t);
        cp.residual = std::abs(ref.det);
        m = realize(spec, cp.lambda);
      }
      try {
        cp.label = label_local(m, cp.k, class_tol);
        cp.labeled = true;
      } catch (const error&) {
        cp.labeled = false;
      }
    }
    out.push_back(std::move(cp));

    a = hi;
    sa = std::move(shi);
    b = 1.0;
  }
}

}  // namespace

std::vector<double> GridSpec::node_lambda(const std::vector<int>& node) const {
  std::vector<double> lam(lo.size());
  for (std::size_t a = 0; a < lo.size(); ++a) {
    if (n[a] <= 1) {
      lam[a] = lo[a];
    } else {
      lam[a] = lo[a] + (hi[a] - lo[a]) * node[a] / (n[a] - 1);
    }
  }
  return lam;
}

std::vector<CriticalPoint> find_critical_points(const FamilySpec& family,
                                                const std::vector<double>& lambda,
                                                const FindOptions& opts) {
  Model m = realize(family, lambda);
  auto pts = find_points_impl(m, opts);
  if (opts.label) {
    const double class_tol = m.from_jet ? 1e-8 : 1e-5;
    for (auto& p : pts) {
      try {
        p.label = label_local(m, p.k, class_tol);
        p.labeled = true;
      } catch (const error&) {
        p.labeled = false;
      }
    }
  }
  return pts;
}

std::vector<std::pair<std::size_t, std::size_t>> pair_twins(
    const std::vector<CriticalPoint>& points, Domain domain, double tol) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::vector<bool> used(points.size(), false);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].kind != PointKind::twin || used[i]) continue;
    const auto anti = reflect(points[i].k, domain);
    std::size_t best = points.size();
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j == i || used[j] || points[j].kind != PointKind::twin) continue;
      const double d = point_dist(points[j].k, anti, domain);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    if (best == points.size() || bd > tol)
      fail(errc::pairing_failure, "twin has no partner within tolerance");
    used[i] = true;
    used[best] = true;
    out.emplace_back(i, best);
  }
  return out;
}

CausticDiagram sweep(const FamilySpec& family) {
  const int l = family.n_params;
  if (l < 1 || l > 3) fail(errc::precondition_violated, "parameter count out of range");
  if (static_cast<int>(family.lam_lo.size()) != l ||
      static_cast<int>(family.lam_hi.size()) != l ||
      static_cast<int>(family.grid.size()) != l)
    fail(errc::precondition_violated, "parameter box and grid must match the parameter count");

  GridSpec grid;
  grid.lo = family.lam_lo;
  grid.hi = family.lam_hi;
  grid.n = family.grid;
  for (int a = 0; a < l; ++a) {
    if (grid.n[a] < 1) fail(errc::precondition_violated, "grid axis needs at least one node");
    if (grid.n[a] > 1) grid.swept.push_back(a);
  }
  if (grid.swept.empty() || grid.swept.size() > 2)
    fail(errc::precondition_violated, "sweep needs one or two swept axes");

  const int ax0 = grid.swept[0];
  const int ax1 = grid.swept.size() == 2 ? grid.swept[1] : -1;
  const int nx = grid.n[static_cast<std::size_t>(ax0)];
  const int ny = ax1 >= 0 ? grid.n[static_cast<std::size_t>(ax1)] : 1;
  const double lambda_tol =
      family.lambda_tol > 0 ? family.lambda_tol : (family.polynomial ? 1e-10 : 1e-7);
  const double class_tol = family.polynomial ? 1e-8 : 1e-5;

  auto full_index = [&](int i, int j) {
    std::vector<int> node(static_cast<std::size_t>(l), 0);
    node[static_cast<std::size_t>(ax0)] = i;
    if (ax1 >= 0) node[static_cast<std::size_t>(ax1)] = j;
    return node;
  };

  // nodes, rows independent so the thread count cannot reorder anything
  std::vector<NodeState> nodes(static_cast<std::size_t>(nx) * ny);
  parallel_for(ny, [&](int j) {
    for (int i = 0; i < nx; ++i) {
      const auto lam = grid.node_lambda(full_index(i, j));
      const std::vector<CriticalPoint>* warm =
          i > 0 ? &nodes[static_cast<std::size_t>(j) * nx + i - 1].pts : nullptr;
      nodes[static_cast<std::size_t>(j) * nx + i] =
          state_at(family, lam, warm, nullptr, true);
    }
  });

  // edges along the first swept axis, then between rows
  std::vector<std::vector<CrossingPoint>> hrow(static_cast<std::size_t>(ny));
  std::vector<char> hcut(static_cast<std::size_t>(std::max(0, nx - 1)) * ny, 0);
  parallel_for(ny, [&](int j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const NodeState& su = nodes[static_cast<std::size_t>(j) * nx + i];
      const NodeState& sv = nodes[static_cast<std::size_t>(j) * nx + i + 1];
      if (su.sig == sv.sig) continue;
      EdgeJob job;
      job.lam_u = grid.node_lambda(full_index(i, j));
      job.lam_v = grid.node_lambda(full_index(i + 1, j));
      job.su = &su;
      job.sv = &sv;
      job.axis = ax0;
      job.node = full_index(i, j);
      const std::size_t before = hrow[static_cast<std::size_t>(j)].size();
      scan_edge(family, job, lambda_tol, class_tol, hrow[static_cast<std::size_t>(j)]);
      if (hrow[static_cast<std::size_t>(j)].size() > before)
        hcut[static_cast<std::size_t>(j) * (nx - 1) + i] = 1;
    }
  });

  std::vector<std::vector<CrossingPoint>> vrow(static_cast<std::size_t>(std::max(0, ny - 1)));
  std::vector<char> vcut(static_cast<std::size_t>(nx) * std::max(0, ny - 1), 0);
  if (ny > 1) {
    parallel_for(ny - 1, [&](int j) {
      for (int i = 0; i < nx; ++i) {
        const NodeState& su = nodes[static_cast<std::size_t>(j) * nx + i];
        const NodeState& sv = nodes[static_cast<std::size_t>(j + 1) * nx + i];
        if (su.sig == sv.sig) continue;
        EdgeJob job;
        job.lam_u = grid.node_lambda(full_index(i, j));
        job.lam_v = grid.node_lambda(full_index(i, j + 1));
        job.su = &su;
        job.sv = &sv;
        job.axis = ax1;
        job.node = full_index(i, j);
        const std::size_t before = vrow[static_cast<std::size_t>(j)].size();
        scan_edge(family, job, lambda_tol, class_tol, vrow[static_cast<std::size_t>(j)]);
        if (vrow[static_cast<std::size_t>(j)].size() > before)
          vcut[static_cast<std::size_t>(j) * nx + i] = 1;
      }
    });
  }

  CausticDiagram d;
  d.nu = family.nu;
  d.n_params = l;
  d.parity = family.parity;
  d.domain = family.domain;
  d.grid = grid;
  for (auto& row : hrow)
    for (auto& cp : row) d.crossings.push_back(std::move(cp));
  for (auto& row : vrow)
    for (auto& cp : row) d.crossings.push_back(std::move(cp));
  for (const auto& cp : d.crossings)
    if (cp.ambiguous) ++d.unresolved_cells;

  // flood fill across uncut edges
  const std::size_t total = static_cast<std::size_t>(nx) * ny;
  d.region_of_node.assign(total, -1);
  auto cut_h = [&](int i, int j) { return hcut[static_cast<std::size_t>(j) * (nx - 1) + i] != 0; };
  auto cut_v = [&](int i, int j) { return vcut[static_cast<std::size_t>(j) * nx + i] != 0; };
  int next_region = 0;
  std::vector<std::size_t> queue;
  for (std::size_t start = 0; start < total; ++start) {
    if (d.region_of_node[start] >= 0) continue;
    const int id = next_region++;
    queue.clear();
    queue.push_back(start);
    d.region_of_node[start] = id;
    while (!queue.empty()) {
      const std::size_t cur = queue.back();
      queue.pop_back();
      const int i = static_cast<int>(cur % nx);
      const int j = static_cast<int>(cur / nx);
      auto visit = [&](int i2, int j2) {
        const std::size_t nxt = static_cast<std::size_t>(j2) * nx + i2;
        if (d.region_of_node[nxt] < 0) {
          d.region_of_node[nxt] = id;
          queue.push_back(nxt);
        }
      };
      if (i + 1 < nx && !cut_h(i, j)) visit(i + 1, j);
      if (i > 0 && !cut_h(i - 1, j)) visit(i - 1, j);
      if (j + 1 < ny && !cut_v(i, j)) visit(i, j + 1);
      if (j > 0 && !cut_v(i, j - 1)) visit(i, j - 1);
    }
  }

  d.regions.resize(static_cast<std::size_t>(next_region));
  for (int r = 0; r < next_region; ++r) d.regions[static_cast<std::size_t>(r)].id = r;
  std::vector<char> has_interior(static_cast<std::size_t>(next_region), 0);
  std::vector<Signature> rep(static_cast<std::size_t>(next_region));
  for (std::size_t idx = 0; idx < total; ++idx) {
    const int i = static_cast<int>(idx % nx);
    const int j = static_cast<int>(idx / nx);
    const int r = d.region_of_node[idx];
    CausticRegion& reg = d.regions[static_cast<std::size_t>(r)];
    ++reg.nodes;
    if (reg.sample_lambda.empty())
      reg.sample_lambda = grid.node_lambda(full_index(i, j));
    bool interior = true;
    if (i + 1 < nx) interior = interior && !cut_h(i, j);
    if (i > 0) interior = interior && !cut_h(i - 1, j);
    if (j + 1 < ny) interior = interior && !cut_v(i, j);
    if (j > 0) interior = interior && !cut_v(i, j - 1);
    if (!interior) continue;
    const NodeState& ns = nodes[idx];
    if (!has_interior[static_cast<std::size_t>(r)]) {
      has_interior[static_cast<std::size_t>(r)] = 1;
      rep[static_cast<std::size_t>(r)] = ns.sig;
      reg.census = census_of(ns.pts);
      reg.sample_lambda = grid.node_lambda(full_index(i, j));
    } else if (ns.sig != rep[static_cast<std::size_t>(r)]) {
      reg.unresolved = true;
    }
  }
  for (int r = 0; r < next_region; ++r) {
    CausticRegion& reg = d.regions[static_cast<std::size_t>(r)];
    if (!has_interior[static_cast<std::size_t>(r)]) reg.unresolved = true;
  }
  for (const auto& reg : d.regions)
    if (reg.unresolved) ++d.unresolved_cells;
  return d;
}

const std::vector<CausticRegion>& region_census(const CausticDiagram& diagram) {
  return diagram.regions;
}

}  // namespace germlab
