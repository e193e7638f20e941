#include "germlab/localalg.hpp"

#include "germlab/errors.hpp"

#include <algorithm>
#include <map>

namespace germlab {

namespace {

// Treats the jet as an exact polynomial: products may exceed its stored order
// and the missing coefficients are genuine zeros.
JetQ as_polynomial(const JetQ& f, int T) {
  JetQ g(f.nu(), std::max(T, f.max_degree()), f.parity());
  for (const auto& [alpha, c] : f.coeffs()) g.set_coeff(alpha, c);
  return truncate(g, T);
}

}  // namespace

std::vector<MultiIndex> algebra_columns(int nu, int T, Parity parity) {
  std::vector<MultiIndex> cols;
  for (const MultiIndex& m : all_indices(static_cast<std::size_t>(nu), T))
    if (parity == Parity::general || m.even()) cols.push_back(m);
  return cols;
}

MatQ gradient_relation_matrix(const JetQ& f, int T, const std::vector<MultiIndex>& columns) {
  int nu = f.nu();
  JetQ fp = as_polynomial(f, T + 1);

  std::map<MultiIndex, std::size_t> col_of;
  for (std::size_t j = 0; j < columns.size(); ++j) col_of[columns[j]] = j;

  std::vector<JetQ> partials;
  for (int i = 0; i < nu; ++i) partials.push_back(derivative(fp, i));

  bool odd_multipliers = f.parity() == Parity::even;
  std::vector<MultiIndex> multipliers;
  for (const MultiIndex& m : all_indices(static_cast<std::size_t>(nu), std::max(T - 1, 0)))
    if (!odd_multipliers || m.degree() % 2 == 1) multipliers.push_back(m);

  std::vector<std::vector<Rat>> rows;
  for (const MultiIndex& g : multipliers) {
    for (int i = 0; i < nu; ++i) {
      std::vector<Rat> row(columns.size(), Rat(0));
      bool nonzero = false;
      for (const auto& [alpha, c] : partials[i].coeffs()) {
        MultiIndex m = alpha;
        for (std::size_t v = 0; v < m.size(); ++v) m[v] += g[v];
        if (m.degree() > T) continue;
        auto it = col_of.find(m);
        if (it == col_of.end()) continue;  // parity filtered
        row[it->second] += c;
        nonzero = true;
      }
      if (nonzero) rows.push_back(std::move(row));
    }
  }

  MatQ mat(rows.size(), columns.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < columns.size(); ++j) mat(i, j) = rows[i][j];
  return mat;
}

MultiplicityResult multiplicity(const JetQ& f, int n_start) {
  int nu = f.nu();
  bool even = f.parity() == Parity::even;
  int step = even ? 2 : 1;
  int T = std::max(n_start, even ? 4 : 3);
  if (even && T % 2) ++T;

  constexpr int budget = 36;
  int prev_dim = -1;
  MultiplicityResult out;

  for (; T <= budget; T += step) {
    std::vector<MultiIndex> cols = algebra_columns(nu, T, f.parity());
    MatQ rel = gradient_relation_matrix(f, T, cols);
    std::vector<std::size_t> pivots = rref(rel);
    int dim = static_cast<int>(cols.size() - pivots.size());

    std::vector<bool> eliminated(cols.size(), false);
    for (std::size_t p : pivots) eliminated[p] = true;

    out.basis.truncation_degree = T;
    out.basis.dimension = dim;
    out.basis.monomials.clear();
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (!eliminated[j]) out.basis.monomials.push_back(cols[j]);
    out.mult = dim;

    if (dim == prev_dim && T >= 2 * (dim + 1)) {
      out.basis.stabilized = true;
      return out;
    }
    prev_dim = dim;
  }
  out.basis.stabilized = false;
  return out;
}

}  // namespace germlab
