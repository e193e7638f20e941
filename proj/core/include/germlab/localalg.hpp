#pragma once

#include "germlab/jet.hpp"
#include "germlab/matrix.hpp"

#include <vector>

namespace germlab {

struct QuotientBasis {
  int truncation_degree = 0;
  std::vector<MultiIndex> monomials;  // representatives surviving the reduction
  int dimension = 0;
  bool stabilized = false;
};

struct MultiplicityResult {
  int mult = 0;
  QuotientBasis basis;
};

// Span of the products (multiplier) * (partial of f), truncated at degree T
// and written in the coordinates of `columns`. Multipliers run over all
// monomials for general jets and over odd monomials for even jets, so the
// products always live in the column space.
MatQ gradient_relation_matrix(const JetQ& f, int T, const std::vector<MultiIndex>& columns);

// Monomials spanning the ambient space of the degree-T local algebra:
// everything up to degree T for general jets, the even part for even jets.
// Constants are included.
std::vector<MultiIndex> algebra_columns(int nu, int T, Parity parity);

// Dimension of the (even) local algebra of an exact polynomial critical germ,
// found by raising the truncation degree until the dimension stops moving and
// the degree is at least twice the answer plus two. A dimension that never
// settles within the budget comes back with stabilized == false.
MultiplicityResult multiplicity(const JetQ& f, int n_start = 0);

}  // namespace germlab
