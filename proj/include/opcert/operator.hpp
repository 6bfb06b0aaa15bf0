#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "opcert/linalg.hpp"
#include "opcert/rational.hpp"

namespace opcert {

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Exact rational basis of a subspace; vectors are validated independent.
struct SubspaceBasis {
  int ambient_dim = 0;
  std::vector<Vec<Rat>> vectors;

  SubspaceBasis() = default;
  SubspaceBasis(int ambient, std::vector<Vec<Rat>> vecs)
      : ambient_dim(ambient), vectors(std::move(vecs)) {
    for (const auto& v : vectors)
      if (static_cast<int>(v.size()) != ambient_dim)
        throw DimensionError("SubspaceBasis: vector length mismatch");
    if (!vectors.empty()) {
      Mat<Rat> stacked = from_columns(ambient_dim, vectors);
      if (rank(stacked) != static_cast<int>(vectors.size()))
        throw ValidationError("SubspaceBasis: vectors are dependent");
    }
  }

  int dim() const { return static_cast<int>(vectors.size()); }
};

/// First-order constant-coefficient operator A = sum_i A_i d_i with exact
/// rational coefficient matrices A_i : V -> W. Immutable after construction;
/// derived data (W_A basis, Gram inverse, dual membership constraints) is
/// computed once here.
class Operator {
 public:
  Operator(int n, int dim_v, int dim_w, std::vector<Mat<Rat>> coeffs,
           std::string name = {}, std::optional<Mat<Rat>> gram = std::nullopt)
      : n_(n), dim_v_(dim_v), dim_w_(dim_w), coeffs_(std::move(coeffs)),
        name_(std::move(name)) {
    if (n_ < 1 || dim_v_ < 1 || dim_w_ < 1)
      throw ValidationError("Operator: dimensions must be >= 1");
    if (static_cast<int>(coeffs_.size()) != n_)
      throw ValidationError("Operator: expected n coefficient matrices");
    bool any_nonzero = false;
    for (const auto& a : coeffs_) {
      if (a.rows() != dim_w_ || a.cols() != dim_v_)
        throw DimensionError("Operator: coefficient matrix is not M x N");
      if (!a.all_zero()) any_nonzero = true;
    }
    if (!any_nonzero) throw ValidationError("Operator: zero operator rejected");

    if (gram) {
      if (gram->rows() != dim_w_ || gram->cols() != dim_w_)
        throw DimensionError("Operator: gram must be M x M");
      gram_ = std::move(*gram);
      if (gram_ != gram_.transpose())
        throw ValidationError("Operator: gram must be symmetric");
      gram_inv_ = inverse(gram_);  // throws if singular
    } else {
      gram_ = Mat<Rat>::identity(dim_w_);
      gram_inv_ = gram_;
    }

    // W_A = span of all symbol images = column span of [A_1 | ... | A_n],
    // since symbol(e_i) = A_i and symbol(xi) is a combination of the A_i.
    Mat<Rat> stacked(dim_w_, n_ * dim_v_);
    for (int i = 0; i < n_; ++i)
      for (int r = 0; r < dim_w_; ++r)
        for (int c = 0; c < dim_v_; ++c)
          stacked(r, i * dim_v_ + c) = coeffs_[i](r, c);
    wa_ = SubspaceBasis(dim_w_, column_space_basis(stacked));

    // (W_A)* membership for dual coordinates u: u annihilates the
    // Gram-orthogonal complement Z of W_A, i.e. z^T u = 0 for z with
    // B^T G z = 0. Stored as the constraint matrix Z^T.
    Mat<Rat> bt_g = from_columns(dim_w_, wa_.vectors).transpose() * gram_;
    auto z = nullspace(bt_g);
    wa_dual_constraints_ = Mat<Rat>(static_cast<int>(z.size()), dim_w_);
    for (size_t r = 0; r < z.size(); ++r)
      for (int c = 0; c < dim_w_; ++c) wa_dual_constraints_(int(r), c) = z[r][c];
  }

  int n() const { return n_; }
  int dim_v() const { return dim_v_; }
  int dim_w() const { return dim_w_; }
  const std::string& name() const { return name_; }
  const std::vector<Mat<Rat>>& coeffs() const { return coeffs_; }
  const Mat<Rat>& coeff(int i) const { return coeffs_[i]; }
  const Mat<Rat>& gram() const { return gram_; }
  const Mat<Rat>& gram_inv() const { return gram_inv_; }
  bool gram_is_identity() const { return gram_ == Mat<Rat>::identity(dim_w_); }

  /// Cached exact basis of W_A (span of all symbol images).
  const SubspaceBasis& wa_space() const { return wa_; }

  /// Rows z^T with z spanning the Gram-orthocomplement of W_A; a dual
  /// coordinate vector u lies in (W_A)* iff all rows pair to zero with it.
  const Mat<Rat>& wa_dual_constraints() const { return wa_dual_constraints_; }

  bool in_wa_dual(const Vec<Rat>& w_star) const {
    if (static_cast<int>(w_star.size()) != dim_w_)
      throw DimensionError("in_wa_dual: length mismatch");
    return vec_is_zero(wa_dual_constraints_ * w_star);
  }

  /// |w*|^2 in the dual norm on W*: u^T G^{-1} u.
  Rat dual_norm_sq(const Vec<Rat>& w_star) const {
    return dot(w_star, gram_inv_ * w_star);
  }
  /// |w|^2 in the norm on W: w^T G w.
  Rat norm_sq(const Vec<Rat>& w) const { return dot(w, gram_ * w); }

 private:
  int n_, dim_v_, dim_w_;
  std::vector<Mat<Rat>> coeffs_;
  std::string name_;
  Mat<Rat> gram_, gram_inv_;
  SubspaceBasis wa_;
  Mat<Rat> wa_dual_constraints_;
};

/// Principal symbol at a real direction: sum_i xi_i A_i, exact.
inline Mat<Rat> eval_symbol(const Operator& op, const Vec<Rat>& xi) {
  if (static_cast<int>(xi.size()) != op.n())
    throw DimensionError("eval_symbol: xi has wrong length");
  Mat<Rat> s(op.dim_w(), op.dim_v());
  for (int i = 0; i < op.n(); ++i) {
    if (xi[i] == 0) continue;
    s = s + xi[i] * op.coeff(i);
  }
  return s;
}

/// Principal symbol at a Gaussian-rational direction, exact over Q(i).
inline Mat<GRat> eval_symbol_complex(const Operator& op, const Vec<GRat>& xi) {
  if (static_cast<int>(xi.size()) != op.n())
    throw DimensionError("eval_symbol_complex: xi has wrong length");
  Mat<GRat> s(op.dim_w(), op.dim_v());
  for (int i = 0; i < op.n(); ++i) {
    if (xi[i].is_zero()) continue;
    for (int r = 0; r < op.dim_w(); ++r)
      for (int c = 0; c < op.dim_v(); ++c)
        s(r, c) += xi[i] * GRat(op.coeff(i)(r, c));
  }
  return s;
}

/// Pullback tensor g_A(w*): the n x N matrix G[i][j] = <w*, A_i e_j>.
inline Mat<Rat> pullback_tensor(const Operator& op, const Vec<Rat>& w_star) {
  if (static_cast<int>(w_star.size()) != op.dim_w())
    throw DimensionError("pullback_tensor: w* has wrong length");
  Mat<Rat> g(op.n(), op.dim_v());
  for (int i = 0; i < op.n(); ++i)
    for (int j = 0; j < op.dim_v(); ++j) {
      Rat s(0);
      for (int m = 0; m < op.dim_w(); ++m) s += w_star[m] * op.coeff(i)(m, j);
      g(i, j) = s;
    }
  return g;
}

inline SubspaceBasis wa_space(const Operator& op) { return op.wa_space(); }

/// Operator restricted to a 2-plane of directions and a subspace of V.
/// Coefficients B_k = symbol(p_k) composed with the inclusion of vsub;
/// the codomain W (and its Gram) is unchanged.
inline Operator restrict_operator(const Operator& op, const SubspaceBasis& plane,
                                  const SubspaceBasis& vsub) {
  if (plane.ambient_dim != op.n() || plane.dim() != 2)
    throw ValidationError("restrict_operator: plane must be 2 independent vectors in R^n");
  if (vsub.ambient_dim != op.dim_v() || vsub.dim() < 1)
    throw ValidationError("restrict_operator: vsub must be a nonempty subspace of V");
  Mat<Rat> inclusion = from_columns(op.dim_v(), vsub.vectors);
  std::vector<Mat<Rat>> coeffs;
  coeffs.reserve(2);
  for (int k = 0; k < 2; ++k)
    coeffs.push_back(eval_symbol(op, plane.vectors[k]) * inclusion);
  return Operator(2, vsub.dim(), op.dim_w(), std::move(coeffs),
                  op.name().empty() ? "restricted" : op.name() + "|restricted",
                  op.gram());
}

inline Vec<Rat> unit_vec(int n, int i) {
  Vec<Rat> e(n, Rat(0));
  e[i] = 1;
  return e;
}

/// vec of the rank-one tensor xi (x) v*: entry (i*N + j) = xi_i v*_j,
/// matching the row-major layout of pullback_tensor.
inline Vec<Rat> vec_outer(const Vec<Rat>& xi, const Vec<Rat>& v_star) {
  Vec<Rat> out(xi.size() * v_star.size());
  for (size_t i = 0; i < xi.size(); ++i)
    for (size_t j = 0; j < v_star.size(); ++j)
      out[i * v_star.size() + j] = xi[i] * v_star[j];
  return out;
}

inline Vec<Rat> vec_of_matrix(const Mat<Rat>& m) {
  Vec<Rat> out(size_t(m.rows()) * m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out[size_t(i) * m.cols() + j] = m(i, j);
  return out;
}

}  // namespace opcert
