#pragma once

#include "germlab/errors.hpp"
#include "germlab/rational.hpp"

#include <cstddef>
#include <vector>

namespace germlab {

// Dense row-major matrix over the working scalar. Deliberately small: exact
// row reduction and a handful of product helpers are all the library needs
// outside the floating eigen solver (which lives in a .cpp).
template <class R>
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, R fill = R(0))
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = R(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  R& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const R& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend Matrix operator*(const Matrix& x, const Matrix& y) {
    if (x.cols_ != y.rows_) fail(errc::singular_linear_part, "matrix product shape mismatch");
    Matrix p(x.rows_, y.cols_);
    for (std::size_t i = 0; i < x.rows_; ++i)
      for (std::size_t k = 0; k < x.cols_; ++k) {
        const R& xik = x(i, k);
        if (xik == R(0)) continue;
        for (std::size_t j = 0; j < y.cols_; ++j) p(i, j) += xik * y(k, j);
      }
    return p;
  }

  bool operator==(const Matrix&) const = default;

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<R> a_;
};

using MatQ = Matrix<Rat>;
using MatD = Matrix<double>;

// In-place reduced row echelon form. Returns pivot column list. For double,
// entries below tol (relative to the largest entry) are treated as zero.
template <class R>
std::vector<std::size_t> rref(Matrix<R>& m, double tol = 1e-12);

template <class R>
std::size_t rank(Matrix<R> m, double tol = 1e-12);

// Basis of the right kernel, one column per basis vector.
template <class R>
Matrix<R> kernel_basis(Matrix<R> m, double tol = 1e-12);

// Inverse of a square matrix; throws singular_block if not invertible.
template <class R>
Matrix<R> inverse(const Matrix<R>& m, double tol = 1e-12);

template <class R>
R determinant(Matrix<R> m);

extern template std::vector<std::size_t> rref<Rat>(Matrix<Rat>&, double);
extern template std::vector<std::size_t> rref<double>(Matrix<double>&, double);
extern template std::size_t rank<Rat>(Matrix<Rat>, double);
extern template std::size_t rank<double>(Matrix<double>, double);
extern template Matrix<Rat> kernel_basis<Rat>(Matrix<Rat>, double);
extern template Matrix<double> kernel_basis<double>(Matrix<double>, double);
extern template Matrix<Rat> inverse<Rat>(const Matrix<Rat>&, double);
extern template Matrix<double> inverse<double>(const Matrix<double>&, double);
extern template Rat determinant<Rat>(Matrix<Rat>);
extern template double determinant<double>(Matrix<double>);

}  // namespace germlab
