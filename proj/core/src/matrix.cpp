#include "germlab/matrix.hpp"

#include <cmath>
#include <cstdlib>

namespace germlab {

namespace {

double scale_of(const MatD& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s = std::max(s, std::abs(m(i, j)));
  return s;
}

template <class R>
bool negligible(const R& x, double /*floor*/) {
  return x == R(0);
}

bool negligible(double x, double floor) { return std::abs(x) <= floor; }

template <class R>
std::size_t pick_pivot(const Matrix<R>& m, std::size_t row, std::size_t col) {
  // Exact scalars: any nonzero entry will do.
  for (std::size_t i = row; i < m.rows(); ++i)
    if (m(i, col) != R(0)) return i;
  return m.rows();
}

std::size_t pick_pivot(const MatD& m, std::size_t row, std::size_t col) {
  std::size_t best = m.rows();
  double mag = 0.0;
  for (std::size_t i = row; i < m.rows(); ++i)
    if (std::abs(m(i, col)) > mag) {
      mag = std::abs(m(i, col));
      best = i;
    }
  return best;
}

}  // namespace

template <class R>
std::vector<std::size_t> rref(Matrix<R>& m, double tol) {
  double floor = 0.0;
  if constexpr (!scalar_traits<R>::exact) floor = tol * scale_of(m);

  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t p = pick_pivot(m, row, col);
    if (p == m.rows() || negligible(m(p, col), floor)) continue;
    if (p != row)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
    R inv = R(1) / m(row, col);
    for (std::size_t j = 0; j < m.cols(); ++j) m(row, j) *= inv;
    m(row, col) = R(1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col) == R(0)) continue;
      R factor = m(i, col);
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) -= factor * m(row, j);
      m(i, col) = R(0);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <class R>
std::size_t rank(Matrix<R> m, double tol) {
  return rref(m, tol).size();
}

template <class R>
Matrix<R> kernel_basis(Matrix<R> m, double tol) {
  std::vector<std::size_t> pivots = rref(m, tol);
  std::vector<bool> is_pivot(m.cols(), false);
  for (std::size_t c : pivots) is_pivot[c] = true;

  std::size_t dim = m.cols() - pivots.size();
  Matrix<R> k(m.cols(), dim);
  std::size_t out = 0;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    k(free, out) = R(1);
    for (std::size_t r = 0; r < pivots.size(); ++r) k(pivots[r], out) = -m(r, free);
    ++out;
  }
  return k;
}

template <class R>
Matrix<R> inverse(const Matrix<R>& m, double tol) {
  if (m.rows() != m.cols()) fail(errc::singular_block, "inverse of non-square matrix");
  std::size_t n = m.rows();
  Matrix<R> aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = R(1);
  }
  std::vector<std::size_t> pivots = rref(aug, tol);
  if (pivots.size() != n || pivots.back() != n - 1)
    fail(errc::singular_block, "matrix is singular");
  Matrix<R> inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

template <class R>
R determinant(Matrix<R> m) {
  if (m.rows() != m.cols()) fail(errc::singular_block, "determinant of non-square matrix");
  std::size_t n = m.rows();
  R det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = pick_pivot(m, col, col);
    if (p == m.rows() || m(p, col) == R(0)) return R(0);
    if (p != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(col, j));
      det = -det;
    }
    det *= m(col, col);
    for (std::size_t i = col + 1; i < n; ++i) {
      if (m(i, col) == R(0)) continue;
      R factor = m(i, col) / m(col, col);
      for (std::size_t j = col; j < n; ++j) m(i, j) -= factor * m(col, j);
    }
  }
  return det;
}

template std::vector<std::size_t> rref<Rat>(Matrix<Rat>&, double);
template std::vector<std::size_t> rref<double>(Matrix<double>&, double);
template std::size_t rank<Rat>(Matrix<Rat>, double);
template std::size_t rank<double>(Matrix<double>, double);
template Matrix<Rat> kernel_basis<Rat>(Matrix<Rat>, double);
template Matrix<double> kernel_basis<double>(Matrix<double>, double);
template Matrix<Rat> inverse<Rat>(const Matrix<Rat>&, double);
template Matrix<double> inverse<double>(const Matrix<double>&, double);
template Rat determinant<Rat>(Matrix<Rat>);
template double determinant<double>(Matrix<double>);

}  // namespace germlab
