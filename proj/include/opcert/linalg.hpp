#pragma once

#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "opcert/rational.hpp"

namespace opcert {

template <class T>
using Vec = std::vector<T>;

/// Dense matrix over an exact field (Rat or GRat). Desk-scale sizes only.
template <class T>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), data_(size_t(rows) * cols) {}
  Mat(int rows, int cols, std::initializer_list<T> init)
      : rows_(rows), cols_(cols), data_(init) {
    assert(static_cast<int>(data_.size()) == rows * cols);
  }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  T& operator()(int i, int j) { return data_[size_t(i) * cols_ + j]; }
  const T& operator()(int i, int j) const { return data_[size_t(i) * cols_ + j]; }

  bool all_zero() const {
    for (const auto& x : data_)
      if (!is_zero(x)) return false;
    return true;
  }

  Mat transpose() const {
    Mat m(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  Vec<T> row(int i) const {
    Vec<T> r(cols_);
    for (int j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
    return r;
  }
  Vec<T> col(int j) const {
    Vec<T> c(rows_);
    for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  friend Mat operator+(const Mat& a, const Mat& b) {
    assert(a.rows_ == b.rows_ && a.cols_ == b.cols_);
    Mat m(a.rows_, a.cols_);
    for (size_t k = 0; k < a.data_.size(); ++k) m.data_[k] = a.data_[k] + b.data_[k];
    return m;
  }
  friend Mat operator-(const Mat& a, const Mat& b) {
    assert(a.rows_ == b.rows_ && a.cols_ == b.cols_);
    Mat m(a.rows_, a.cols_);
    for (size_t k = 0; k < a.data_.size(); ++k) m.data_[k] = a.data_[k] - b.data_[k];
    return m;
  }
  friend Mat operator*(const T& s, const Mat& a) {
    Mat m(a.rows_, a.cols_);
    for (size_t k = 0; k < a.data_.size(); ++k) m.data_[k] = s * a.data_[k];
    return m;
  }
  friend Mat operator*(const Mat& a, const Mat& b) {
    assert(a.cols_ == b.rows_);
    Mat m(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        if (is_zero(a(i, k))) continue;
        for (int j = 0; j < b.cols_; ++j) m(i, j) += a(i, k) * b(k, j);
      }
    return m;
  }
  friend bool operator==(const Mat& a, const Mat& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  friend Vec<T> operator*(const Mat& a, const Vec<T>& x) {
    assert(static_cast<int>(x.size()) == a.cols_);
    Vec<T> y(a.rows_, T(0));
    for (int i = 0; i < a.rows_; ++i)
      for (int j = 0; j < a.cols_; ++j) y[i] += a(i, j) * x[j];
    return y;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

template <class T>
Vec<T> operator+(const Vec<T>& a, const Vec<T>& b) {
  assert(a.size() == b.size());
  Vec<T> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}
template <class T>
Vec<T> operator-(const Vec<T>& a, const Vec<T>& b) {
  assert(a.size() == b.size());
  Vec<T> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}
template <class T>
Vec<T> operator*(const T& s, const Vec<T>& a) {
  Vec<T> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

template <class T>
bool vec_is_zero(const Vec<T>& v) {
  for (const auto& x : v)
    if (!is_zero(x)) return false;
  return true;
}

/// Plain coordinate pairing (no Gram): sum_i a_i b_i.
template <class T>
T dot(const Vec<T>& a, const Vec<T>& b) {
  assert(a.size() == b.size());
  T s(0);
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// In-place reduced row echelon form; returns pivot column indices.
template <class T>
std::vector<int> rref(Mat<T>& a) {
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < a.cols() && r < a.rows(); ++c) {
    int p = -1;
    for (int i = r; i < a.rows(); ++i)
      if (!is_zero(a(i, c))) { p = i; break; }
    if (p < 0) continue;
    if (p != r)
      for (int j = 0; j < a.cols(); ++j) std::swap(a(p, j), a(r, j));
    T inv = T(1) / a(r, c);
    for (int j = 0; j < a.cols(); ++j) a(r, j) = inv * a(r, j);
    for (int i = 0; i < a.rows(); ++i) {
      if (i == r || is_zero(a(i, c))) continue;
      T f = a(i, c);
      for (int j = 0; j < a.cols(); ++j) a(i, j) -= f * a(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

template <class T>
int rank(Mat<T> a) {
  return static_cast<int>(rref(a).size());
}

/// Basis of {x : a x = 0}.
template <class T>
std::vector<Vec<T>> nullspace(Mat<T> a) {
  std::vector<int> pivots = rref(a);
  std::vector<bool> is_pivot(a.cols(), false);
  for (int c : pivots) is_pivot[c] = true;
  std::vector<Vec<T>> basis;
  for (int c = 0; c < a.cols(); ++c) {
    if (is_pivot[c]) continue;
    Vec<T> v(a.cols(), T(0));
    v[c] = T(1);
    for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -a(int(r), c);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Any exact solution of a x = b, or nullopt if inconsistent.
template <class T>
std::optional<Vec<T>> solve(const Mat<T>& a, const Vec<T>& b) {
  assert(static_cast<int>(b.size()) == a.rows());
  Mat<T> aug(a.rows(), a.cols() + 1);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[i];
  }
  std::vector<int> pivots = rref(aug);
  if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;
  Vec<T> x(a.cols(), T(0));
  for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(int(r), a.cols());
  return x;
}

template <class T>
Mat<T> from_columns(int ambient, const std::vector<Vec<T>>& cols) {
  Mat<T> m(ambient, static_cast<int>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) {
    assert(static_cast<int>(cols[j].size()) == ambient);
    for (int i = 0; i < ambient; ++i) m(i, int(j)) = cols[j][i];
  }
  return m;
}

/// Basis of the column span, extracted from the pivot columns.
template <class T>
std::vector<Vec<T>> column_space_basis(const Mat<T>& a) {
  Mat<T> copy = a;
  std::vector<int> pivots = rref(copy);
  std::vector<Vec<T>> basis;
  basis.reserve(pivots.size());
  for (int c : pivots) basis.push_back(a.col(c));
  return basis;
}

/// Basis of span(u) ∩ span(v), both given as column lists in one ambient space.
template <class T>
std::vector<Vec<T>> intersect_spans(int ambient, const std::vector<Vec<T>>& u,
                                    const std::vector<Vec<T>>& v) {
  if (u.empty() || v.empty()) return {};
  // [U | -V] x = 0  =>  U x_u = V x_v is a common vector.
  Mat<T> m(ambient, static_cast<int>(u.size() + v.size()));
  for (size_t j = 0; j < u.size(); ++j)
    for (int i = 0; i < ambient; ++i) m(i, int(j)) = u[j][i];
  for (size_t j = 0; j < v.size(); ++j)
    for (int i = 0; i < ambient; ++i) m(i, int(u.size() + j)) = -v[j][i];
  std::vector<Vec<T>> common;
  for (const auto& x : nullspace(m)) {
    Vec<T> w(ambient, T(0));
    for (size_t j = 0; j < u.size(); ++j)
      for (int i = 0; i < ambient; ++i) w[i] += x[j] * u[j][i];
    if (!vec_is_zero(w)) common.push_back(std::move(w));
  }
  // The construction may return a dependent list; reduce it.
  if (common.empty()) return {};
  return column_space_basis(from_columns(ambient, common));
}

/// Exact inverse; throws on singular input.
template <class T>
Mat<T> inverse(const Mat<T>& a) {
  assert(a.rows() == a.cols());
  int n = a.rows();
  Mat<T> aug(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = T(1);
  }
  std::vector<int> pivots = rref(aug);
  if (static_cast<int>(pivots.size()) < n || pivots[n - 1] != n - 1)
    throw std::domain_error("inverse: singular matrix");
  Mat<T> inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

/// Determinant over any commutative ring (Laplace expansion; tiny sizes).
template <class T>
T det_laplace(const Mat<T>& a) {
  assert(a.rows() == a.cols());
  int n = a.rows();
  if (n == 0) return T(1);
  if (n == 1) return a(0, 0);
  if (n == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  T acc(0);
  for (int i = 0; i < n; ++i) {
    if (is_zero(a(i, 0))) continue;
    Mat<T> sub(n - 1, n - 1);
    int r = 0;
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      for (int j = 1; j < n; ++j) sub(r, j - 1) = a(k, j);
      ++r;
    }
    T term = a(i, 0) * det_laplace(sub);
    if (i % 2 == 0)
      acc += term;
    else
      acc -= term;
  }
  return acc;
}

}  // namespace opcert
