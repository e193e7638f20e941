#pragma once

#include "germlab/jet.hpp"
#include "germlab/labels.hpp"
#include "germlab/matrix.hpp"

#include <array>
#include <optional>
#include <vector>

namespace germlab {

// Result of eliminating the non-degenerate directions of a critical jet:
// psi(k) = f(k, Z(k)) where Z solves the stationarity equations of the
// regular block. reduced keeps only the kernel variables.
template <class R>
struct KernelReduction {
  HessianAnalysis<R> analysis;
  Jet<R> aligned;              // f after align_kernel, kernel variables first
  Jet<R> reduced;              // psi in corank variables
  std::vector<Jet<R>> z_of_k;  // eliminated coordinates as series in the kernel variables
};

template <class R>
KernelReduction<R> kernel_reduction(const Jet<R>& f, double tol = 1e-8);

// Scalar sequence of a corank-1 jet (kernel variable first, regular block
// non-degenerate): entry [i] is the raw pure derivative of order i+3 of the
// reduced one-variable germ, so [0] vanishing means a flatter-than-cubic
// reduction. mu_max bounds the subscript of the last entry.
template <class R>
std::vector<R> a_seq(const Jet<R>& aligned, int mu_max);

// Even counterpart: entry [i] is the raw pure derivative of order 2i+4 of the
// reduced even one-variable germ.
template <class R>
std::vector<R> a_e_seq(const Jet<R>& aligned, int mu_max);

// Cubic discriminant of a corank-2 jet, from the divided cubic coefficients
// [c30, c21, c12, c03] of the reduced germ:
//   4(c21^3 c03 + c30 c12^3) + 27 c30^2 c03^2 - c21^2 c12^2 - 18 c30 c21 c12 c03.
// Nonzero iff the cubic is squarefree; negative iff it has three distinct
// real root lines.
template <class R>
R delta3(const Jet<R>& aligned_corank2);

// Quartic discriminant of an even corank-2 jet from the divided quartic
// [A,B,C,D,E] of the reduced germ. Zero iff the quartic has a repeated
// complex root line; positive for zero or four simple real lines, negative
// for exactly two.
template <class R>
R delta4(const Jet<R>& aligned_corank2);

template <class R>
R delta4_of(const std::array<R, 5>& divided_quartic);

// Working frame of the corank-2 route whose cubic is a square times an
// independent line. The map is rational and the frame is only sign-adapted,
// never rescaled; c is the divided x^2 y coefficient there (positive).
template <class R>
struct DFrame {
  Matrix<R> map;          // 2x2 change applied to the reduced germ
  Jet<R> reduced;         // reduced germ in the working frame, before shears
  Jet<R> sheared;         // after the cross-term shears
  R c{};                  // divided x^2 y coefficient
  std::vector<R> shear;   // shear coefficients, index i kills x*y^(i+2)
  std::vector<R> d;       // d[i] is the scalar for subscript i+4
};

template <class R>
DFrame<R> d_frame(const Jet<R>& aligned_corank2, int mu_max);

template <class R>
std::vector<R> d_seq(const Jet<R>& aligned_corank2, int mu_max);

// Canonical shape of a nonzero binary quartic, with a rational witness map.
//   case 1: no repeated line (four distinct root lines over C), or a definite
//           square; diagonal frame eps x^4 + a' x^2 y^2 + delta y^4
//   case 2: one double line, remaining conic non-degenerate off the line
//   case 3: two distinct line squares (or an indefinite square)
//   case 4: a triple line times an independent line
//   case 5: a fourth power of a line
// a is the scale-invariant middle coefficient of case 1 (|a| = 2 marks a
// definite square) and the leftover modulus slot otherwise. When eps == delta
// the diagonal presentation is two-valued (a 45-degree frame change swaps the
// values); the reported eps/delta/a are the canonical choice (smallest
// denominator, then smallest magnitude, then positive sign), which can be the
// mirror of the literal diagonal reached by map.
template <class R>
struct FourFormCanon {
  int case_id = 0;
  Matrix<R> map;  // columns are the new basis; W(map * v) has the stated shape
  int eps = 0, eta = 0, delta = 0;
  bool has_a = false;
  R a{};
  bool exact = true;       // false when signs/modulus needed floating root work
  double a_approx = 0.0;   // always filled when has_a
};

template <class R>
FourFormCanon<R> canonical_4form(const std::array<R, 5>& divided_quartic);

// Scalar sequence of the doubly-degenerate even route. The jet must be in a
// frame with divided quartic alpha x^4 + beta x^2 y^2 (alpha, beta nonzero,
// no other quartic terms except a free y^4); eps and eta must match the signs
// of alpha and beta. Entry [i] is the scalar for subscript i+5; entry [0] is
// the raw pure y^4 derivative.
template <class R>
struct XeFrame {
  Jet<R> sheared;
  R alpha{}, beta{};
  std::vector<R> shear;  // index j kills x*y^(2j+3)
  std::vector<R> x;      // x[i] is the scalar for subscript i+5
};

template <class R>
XeFrame<R> x_e_frame(const Jet<R>& adapted, int mu_max, int eps, int eta);

template <class R>
std::vector<R> x_e_seq(const Jet<R>& adapted, int mu_max, int eps, int eta);

// Detector for the definite-square quartic route: the rotationally reduced
// sixth-order coefficient. Returns the class sign and the positive modulus,
// or nothing when the coefficient vanishes (outside the catalogue).
template <class R>
struct YtildeResult {
  int eps = 0;
  bool exact = true;
  R a{};
  double a_approx = 0.0;
};

template <class R>
std::optional<YtildeResult<R>> detect_ytilde3(const Jet<R>& aligned_even);

// Detector for the triple-line quartic route.
template <class R>
std::optional<SingularityLabel> detect_ze7(const Jet<R>& aligned_even);

struct ClassifyOptions {
  int mu_max = 16;
  double tol = 1e-8;
};

template <class R>
SingularityLabel classify(const Jet<R>& f, ClassifyOptions options = {});

}  // namespace germlab
