#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "sll/errors.hpp"

namespace sll {

/// Dense row-major matrix of doubles. Deliberately minimal: the library works
/// with small stochastic matrices (n is the agent count) and every product is
/// the plain triple loop, so two code paths multiplying the same operands
/// produce the same floating-point sequence.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw ConfigError("matrix product: inner dimensions differ");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t j = 0; j < b.cols_; ++j) {
        double s = 0.0;
        for (std::size_t l = 0; l < a.cols_; ++l) s += a(i, l) * b(l, j);
        c(i, j) = s;
      }
    }
    return c;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline bool is_row_stochastic(const Matrix& a, double tol) {
  if (a.rows() == 0 || a.rows() != a.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j) < -tol) return false;
      sum += a(i, j);
    }
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return true;
}

inline bool is_column_stochastic(const Matrix& a, double tol) {
  if (a.rows() == 0 || a.rows() != a.cols()) return false;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (a(i, j) < -tol) return false;
      sum += a(i, j);
    }
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return true;
}

}  // namespace sll
