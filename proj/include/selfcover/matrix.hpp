#pragma once

#include <initializer_list>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "selfcover/integers.hpp"

namespace selfcover {

// Dense integer matrix with arbitrary-precision entries, row-major storage.
// Values are immutable in spirit: operations return new matrices.
class IntMatrix {
 public:
  IntMatrix() : rows_(0), cols_(0) {}

  IntMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, Int(0)) {}

  IntMatrix(std::initializer_list<std::initializer_list<Int>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    a_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw std::invalid_argument("IntMatrix: ragged rows");
      for (const auto& v : r) a_.push_back(v);
    }
  }

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  static IntMatrix from_rows(const std::vector<std::vector<Int>>& rows) {
    std::size_t r = rows.size();
    std::size_t c = r ? rows[0].size() : 0;
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c) throw std::invalid_argument("IntMatrix: ragged rows");
      for (std::size_t j = 0; j < c; ++j) m.at(i, j) = rows[i][j];
    }
    return m;
  }

  static IntMatrix diagonal(const std::vector<Int>& d) {
    IntMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m.at(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Int& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Int& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::vector<Int> row(std::size_t i) const {
    return std::vector<Int>(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_);
  }

  std::vector<Int> col(std::size_t j) const {
    std::vector<Int> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = at(i, j);
    return v;
  }

  IntMatrix transpose() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
  }

  bool is_zero() const {
    for (const auto& v : a_)
      if (v != 0) return false;
    return true;
  }

  friend IntMatrix operator+(const IntMatrix& x, const IntMatrix& y) {
    check_same_shape(x, y);
    IntMatrix r(x.rows_, x.cols_);
    for (std::size_t i = 0; i < x.a_.size(); ++i) r.a_[i] = x.a_[i] + y.a_[i];
    return r;
  }

  friend IntMatrix operator-(const IntMatrix& x, const IntMatrix& y) {
    check_same_shape(x, y);
    IntMatrix r(x.rows_, x.cols_);
    for (std::size_t i = 0; i < x.a_.size(); ++i) r.a_[i] = x.a_[i] - y.a_[i];
    return r;
  }

  friend IntMatrix operator*(const IntMatrix& x, const IntMatrix& y) {
    if (x.cols_ != y.rows_) throw std::invalid_argument("IntMatrix: shape mismatch in product");
    IntMatrix r(x.rows_, y.cols_);
    for (std::size_t i = 0; i < x.rows_; ++i)
      for (std::size_t k = 0; k < x.cols_; ++k) {
        const Int& xik = x.at(i, k);
        if (xik == 0) continue;
        for (std::size_t j = 0; j < y.cols_; ++j) r.at(i, j) += xik * y.at(k, j);
      }
    return r;
  }

  friend IntMatrix operator*(const Int& s, const IntMatrix& x) {
    IntMatrix r(x.rows_, x.cols_);
    for (std::size_t i = 0; i < x.a_.size(); ++i) r.a_[i] = s * x.a_[i];
    return r;
  }

  friend std::vector<Int> operator*(const IntMatrix& x, const std::vector<Int>& v) {
    if (x.cols_ != v.size()) throw std::invalid_argument("IntMatrix: vector length mismatch");
    std::vector<Int> r(x.rows_, Int(0));
    for (std::size_t i = 0; i < x.rows_; ++i)
      for (std::size_t j = 0; j < x.cols_; ++j) r[i] += x.at(i, j) * v[j];
    return r;
  }

  IntMatrix operator-() const {
    IntMatrix r(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = -a_[i];
    return r;
  }

  friend bool operator==(const IntMatrix& x, const IntMatrix& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
  }
  friend bool operator!=(const IntMatrix& x, const IntMatrix& y) { return !(x == y); }

  IntMatrix pow(std::uint64_t e) const {
    if (!is_square()) throw std::invalid_argument("IntMatrix::pow: matrix not square");
    IntMatrix r = identity(rows_);
    IntMatrix b = *this;
    while (e) {
      if (e & 1) r = r * b;
      b = b * b;
      e >>= 1;
    }
    return r;
  }

  void swap_rows(std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < cols_; ++k) std::swap(at(i, k), at(j, k));
  }

  // row i <- row i + s * row j
  void add_row_multiple(std::size_t i, std::size_t j, const Int& s) {
    if (s == 0) return;
    for (std::size_t k = 0; k < cols_; ++k) at(i, k) += s * at(j, k);
  }

  void negate_row(std::size_t i) {
    for (std::size_t k = 0; k < cols_; ++k) at(i, k) = -at(i, k);
  }

  friend std::ostream& operator<<(std::ostream& os, const IntMatrix& m) {
    os << "[";
    for (std::size_t i = 0; i < m.rows_; ++i) {
      os << (i ? ", [" : "[");
      for (std::size_t j = 0; j < m.cols_; ++j) os << (j ? "," : "") << m.at(i, j);
      os << "]";
    }
    return os << "]";
  }

  std::string str() const {
    std::ostringstream os;
    os << *this;
    return os.str();
  }

 private:
  static void check_same_shape(const IntMatrix& x, const IntMatrix& y) {
    if (x.rows_ != y.rows_ || x.cols_ != y.cols_)
      throw std::invalid_argument("IntMatrix: shape mismatch");
  }

  std::size_t rows_, cols_;
  std::vector<Int> a_;
};

}  // namespace selfcover
