#pragma once

#include "germlab/jet.hpp"
#include "germlab/labels.hpp"

#include <string>
#include <utility>
#include <vector>

namespace germlab {

// A deformation of a critical germ recorded to first order in the parameters:
// the base germ F(.,0) plus one jet per parameter, dirs[j] = dF/dlambda_j at
// lambda = 0. Verdicts consume nothing beyond this first-order data.
//
// Directions live in the same variables and truncation order as the base and
// have no constant term; in even mode they are even. Coefficients beyond a
// direction's stored order count as zero.
template <class R>
struct DeformationJet {
  Jet<R> base;
  std::vector<Jet<R>> dirs;

  int l() const { return static_cast<int>(dirs.size()); }
};

// Validates and normalizes the pieces (directions are zero-extended to the
// base order). Rejects mismatched variable counts or parities, constant
// terms, and direction content beyond the base order.
template <class R>
DeformationJet<R> make_deformation(Jet<R> base, std::vector<Jet<R>> dirs);

// Corank-1 test vectors v_2 .. v_mu_max (index 0 holds v_2). Entry j of v_m
// is the order-(m-1) derivative along the kernel of direction j after the
// regular variables are eliminated through their stationary equations.
// Requires a kernel-aligned corank-1 base.
template <class R>
std::vector<std::vector<R>> v_seq(const DeformationJet<R>& dj, int mu_max);

// Even counterpart: v_{e,m} equals v_{2m-1} of the same data, read at
// derivative order 2m-2. Index 0 holds v_{e,2}.
template <class R>
std::vector<std::vector<R>> v_e_seq(const DeformationJet<R>& dj, int mu_max);

// Corank-2 vectors for a base whose cubic part is c*x^2*y (y^3 term free,
// other cubic coefficients zero). w[m-1] = w_m for m = 1..mu_max; w_1..w_4
// are reads of the eliminated directions, higher w_m are read after the
// x-shears that remove the x*y^(m-2) terms of the base. d[m-1] carries the
// scalar reads d_m (m >= 4) from the same frames, and c the divided x^2*y
// coefficient; the versality combination is w_m - d_m/(2c) * w_1.
template <class R>
struct WVectors {
  std::vector<std::vector<R>> w;
  std::vector<R> d;
  R c{};
};

template <class R>
WVectors<R> w_seq(const DeformationJet<R>& dj, int mu_max);

// Corank-2 even vectors for a base whose quartic part is
// alpha*x^4 + beta*x^2*y^2 + gamma*y^4 with beta != 0 and no odd cross
// terms. x[m-1] = the m-th vector for m = 1..mu_max; the first slot holds
// the scale combination v_{4,0}/alpha - 12 v_{2,2}/beta. Vectors from m = 5
// on are read after the odd x-shears that remove x*y^(2m-6) terms of the
// base; xs[m-1] carries the scalar reads x_{e,m} from the same frames.
// The versality combination is x_m + ((m-3)/48) * xs_m * x_1.
template <class R>
struct XeVectors {
  std::vector<std::vector<R>> x;
  std::vector<R> xs;
  R alpha{}, beta{};
};

template <class R>
XeVectors<R> x_e_vec_seq(const DeformationJet<R>& dj, int mu_max, int eps, int eta);

enum class Verdict {
  versal,
  not_versal,
  undetermined,
};

std::string verdict_name(Verdict v);

// Everything a verdict rests on: the named test vectors, the exact set whose
// independence is required, its rank, and the parameter-count floor mult - 1.
// verdict == versal exactly when rank == combined_test_set.size().
template <class R>
struct VersalityReport {
  std::vector<std::pair<std::string, std::vector<R>>> vectors;
  std::vector<std::pair<std::string, std::vector<R>>> combined_test_set;
  int rank = 0;
  Verdict verdict = Verdict::undetermined;
  std::string reason;
  int min_parameters = 0;
};

// Routes by family: A via v_seq, Ae via v_e_seq, D via w_seq with the
// d/(2c)-combination, Xe via x_e_vec_seq with the (m-3)/48-combination, and
// Xe with vanishing mixed quartic coefficient via an exact local-algebra
// span test (directions' classes against the even gradient span). Morse
// points are versal with an empty test set. Families without a test
// (E6, Ye candidates, Ytilde, Ze) raise unsupported_label.
//
// The label must describe dj.base (normally: label = classify(dj.base)).
// Rational data gives exact verdicts; floating data uses relative singular
// value threshold `tol`, with verdict undetermined when the rank is unstable
// between tol and tol/100.
template <class R>
VersalityReport<R> versality_check(const DeformationJet<R>& dj, const SingularityLabel& label,
                                   double tol = 1e-8);

// The catalogue monomial family for the class, stabilized to `nu` variables:
//   A_mu:  k, k^2, ..., k^(mu-1)         over +-k^(mu+1)
//   Ae_mu: k^2, k^4, ..., k^(2mu-2)      over +-k^(2mu)
//   D_mu:  x, x^2, y, y^2, ..., y^(mu-3) over x^2 y +- y^(mu-1)
//   Xe_5:  x^2, xy, y^2, x^2y^2          over eps x^4 + a x^2y^2 + delta y^4
//   Xe_mu: x^2, xy, y^2, x^4, y^4, ..., y^(2mu-8)
//                                        over eps x^4 + eta x^2y^2 + a y^(2mu-6)
// Signs and the modulus come from the label. Other families raise
// unsupported_label.
DeformationJet<Rat> build_versal_deformation(const SingularityLabel& label, int nu);

extern template struct DeformationJet<Rat>;
extern template struct DeformationJet<double>;
extern template DeformationJet<Rat> make_deformation(JetQ, std::vector<JetQ>);
extern template DeformationJet<double> make_deformation(JetD, std::vector<JetD>);
extern template std::vector<std::vector<Rat>> v_seq(const DeformationJet<Rat>&, int);
extern template std::vector<std::vector<double>> v_seq(const DeformationJet<double>&, int);
extern template std::vector<std::vector<Rat>> v_e_seq(const DeformationJet<Rat>&, int);
extern template std::vector<std::vector<double>> v_e_seq(const DeformationJet<double>&, int);
extern template WVectors<Rat> w_seq(const DeformationJet<Rat>&, int);
extern template WVectors<double> w_seq(const DeformationJet<double>&, int);
extern template XeVectors<Rat> x_e_vec_seq(const DeformationJet<Rat>&, int, int, int);
extern template XeVectors<double> x_e_vec_seq(const DeformationJet<double>&, int, int, int);
extern template VersalityReport<Rat> versality_check(const DeformationJet<Rat>&,
                                                     const SingularityLabel&, double);
extern template VersalityReport<double> versality_check(const DeformationJet<double>&,
                                                        const SingularityLabel&, double);

}  // namespace germlab
