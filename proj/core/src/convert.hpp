#pragma once

// Internal bridges between the exact and floating scalar modes. Floating
// inputs are snapped onto nearby small rationals so the structural decisions
// (root multiplicities, exact cancellations) can run in one arithmetic;
// results flow back as doubles with the exactness claim dropped.

#include "germlab/jet.hpp"
#include "germlab/matrix.hpp"
#include "germlab/rational.hpp"

#include <cmath>
#include <cstdlib>

namespace germlab::conv {

inline double jet_scale(const Jet<double>& f) {
  double s = 0.0;
  for (const auto& [a, v] : f.coeffs()) s = std::max(s, std::abs(v));
  return s > 0.0 ? s : 1.0;
}

inline double jet_scale(const Jet<Rat>& f) {
  double s = 0.0;
  for (const auto& [a, v] : f.coeffs()) s = std::max(s, std::abs(v.convert_to<double>()));
  return s > 0.0 ? s : 1.0;
}

// Coefficients within zero_rel * scale of zero are dropped; the rest are
// lifted by continued fractions, falling back to the exact binary value.
inline Jet<Rat> snap_jet(const Jet<double>& f, double zero_rel = 1e-8) {
  double scale = jet_scale(f);
  Jet<Rat> out(f.nu(), f.max_degree(), f.parity());
  for (const auto& [alpha, v] : f.coeffs()) {
    if (std::abs(v) <= zero_rel * scale) continue;
    auto q = rationalize(v, 1e-7);
    out.set_coeff(alpha, q ? *q : Rat(v));
  }
  if (f.heuristic()) out.mark_heuristic();
  return out;
}

inline Jet<double> jet_to_double(const Jet<Rat>& f) {
  Jet<double> out(f.nu(), f.max_degree(), f.parity());
  for (const auto& [alpha, v] : f.coeffs()) out.set_coeff(alpha, v.convert_to<double>());
  if (f.heuristic()) out.mark_heuristic();
  return out;
}

inline Matrix<double> mat_to_double(const Matrix<Rat>& m) {
  Matrix<double> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).convert_to<double>();
  return out;
}

template <class R>
double to_d(const R& v) {
  return scalar_traits<R>::to_double(v);
}

}  // namespace germlab::conv
