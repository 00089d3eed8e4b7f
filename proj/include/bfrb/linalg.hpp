#pragma once
#include <cstddef>
#include <string>

#include "bfrb/errors.hpp"
#include "bfrb/vec.hpp"

namespace bfrb {

// Dense row-major matrix, sized for desk-scale problems.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Vec apply(const Vec& x) const {
    if (x.size() != cols_) fail(Errc::dimension_mismatch, "matrix-vector size mismatch");
    Vec y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) s += a_[i * cols_ + j] * x[j];
      y[i] = s;
    }
    return y;
  }

  Mat transpose() const {
    Mat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Mat symmetric_part() const {
    Mat s(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) s(i, j) = 0.5 * ((*this)(i, j) + (*this)(j, i));
    return s;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  Vec a_;
};

// Solves A x = b by LU with partial pivoting. Throws on (numerically) singular A.
Vec lu_solve(Mat a, Vec b);

// Largest singular value of M, via power iteration on M^T M. Deterministic start.
double spectral_norm(const Mat& m, double tol = 1e-12, std::size_t max_iters = 100000);

// Smallest eigenvalue of a symmetric matrix, via a shifted power iteration.
double min_eigenvalue_symmetric(const Mat& s, double tol = 1e-12);

}  // namespace bfrb
