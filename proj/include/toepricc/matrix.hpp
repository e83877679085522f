#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include "toepricc/errors.hpp"

namespace toepricc {

using Complex = std::complex<double>;

/// Dense complex matrix, row-major storage. Either dimension may be zero;
/// empty matrices participate in sums and products with the usual
/// conventions (an inner dimension of zero yields the zero matrix).
class CMatrix {
 public:
  CMatrix() = default;

  CMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_)
      throw InvalidMatrix("entry count does not match dimensions");
    require_finite();
  }

  static CMatrix identity(std::size_t n) {
    CMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
    return out;
  }

  static CMatrix from_rows(
      std::initializer_list<std::initializer_list<Complex>> rows) {
    CMatrix out(rows.size(), rows.size() ? rows.begin()->size() : 0);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != out.cols_)
        throw InvalidMatrix("rows of unequal length");
      std::size_t j = 0;
      for (const Complex& v : row) out(i, j++) = v;
      ++i;
    }
    out.require_finite();
    return out;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Complex& operator()(std::size_t i, std::size_t j) {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }
  Complex operator()(std::size_t i, std::size_t j) const {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }

  CMatrix& operator+=(const CMatrix& o) {
    require_same_shape(o, "sum");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  CMatrix& operator-=(const CMatrix& o) {
    require_same_shape(o, "difference");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  CMatrix& operator*=(Complex c) {
    for (Complex& v : data_) v *= c;
    return *this;
  }

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(Complex c, CMatrix a) { return a *= c; }
  friend CMatrix operator*(CMatrix a, Complex c) { return a *= c; }
  friend CMatrix operator-(CMatrix a) { return a *= Complex(-1.0); }

  friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols_ != b.rows_)
      throw InvalidMatrix("inner dimensions disagree in product");
    CMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Complex aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          out(i, j) += aik * b(k, j);
      }
    return out;
  }

  CMatrix adjoint() const {
    CMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  CMatrix block(std::size_t i0, std::size_t j0, std::size_t r,
                std::size_t c) const {
    assert(i0 + r <= rows_ && j0 + c <= cols_);
    CMatrix out(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) out(i, j) = (*this)(i0 + i, j0 + j);
    return out;
  }

  void set_block(std::size_t i0, std::size_t j0, const CMatrix& m) {
    assert(i0 + m.rows_ <= rows_ && j0 + m.cols_ <= cols_);
    for (std::size_t i = 0; i < m.rows_; ++i)
      for (std::size_t j = 0; j < m.cols_; ++j)
        (*this)(i0 + i, j0 + j) = m(i, j);
  }

  double frobenius_norm() const {
    double sum = 0.0;
    for (const Complex& v : data_) sum += std::norm(v);
    return std::sqrt(sum);
  }

  /// Maximum absolute row sum.
  double inf_norm() const {
    double best = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) acc += std::abs((*this)(i, j));
      best = std::max(best, acc);
    }
    return best;
  }

  double max_abs() const {
    double best = 0.0;
    for (const Complex& v : data_) best = std::max(best, std::abs(v));
    return best;
  }

  bool operator==(const CMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  void require_same_shape(const CMatrix& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw InvalidMatrix(std::string("dimension mismatch in ") + op);
  }

  void require_finite() const {
    for (const Complex& v : data_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw InvalidMatrix("non-finite matrix entry");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

}  // namespace toepricc
