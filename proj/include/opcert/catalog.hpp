#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opcert/operator.hpp"

namespace opcert {

/// Gradient of a scalar field: A_i = e_i as an n x 1 matrix.
inline Operator make_gradient(int n) {
  std::vector<Mat<Rat>> a(n, Mat<Rat>(n, 1));
  for (int i = 0; i < n; ++i) a[i](i, 0) = 1;
  return Operator(n, 1, n, std::move(a), "gradient" + std::to_string(n) + "d");
}

/// Symmetrized gradient eps(u) in Sym(n) coordinates: the n diagonal
/// entries first, then the off-diagonal pairs (i<j) in lex order; the Gram
/// matrix diag(1,...,1,2,...,2) recovers the Frobenius norm.
inline Operator make_sym_gradient(int n) {
  int off = n * (n - 1) / 2;
  int m = n + off;
  std::vector<Mat<Rat>> a(n, Mat<Rat>(m, n));
  for (int i = 0; i < n; ++i) a[i](i, i) = 1;
  int row = n;
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q, ++row) {
      // coordinate (p,q): (d_p u_q + d_q u_p) / 2
      a[p](row, q) = Rat(1, 2);
      a[q](row, p) = Rat(1, 2);
    }
  Mat<Rat> gram(m, m);
  for (int i = 0; i < n; ++i) gram(i, i) = 1;
  for (int i = n; i < m; ++i) gram(i, i) = 2;
  return Operator(n, n, m, std::move(a), "sym_gradient" + std::to_string(n) + "d",
                  gram);
}

/// Divergence of a planar vector field: one row (1 0), (0 1).
inline Operator make_divergence(int n = 2) {
  std::vector<Mat<Rat>> a(n, Mat<Rat>(1, n));
  for (int i = 0; i < n; ++i) a[i](0, i) = 1;
  return Operator(n, n, 1, std::move(a), "divergence" + std::to_string(n) + "d");
}

/// Cauchy-Riemann operator: A_1 = I, A_2 = rotation by 90 degrees.
inline Operator make_cauchy_riemann() {
  Mat<Rat> a1 = Mat<Rat>::identity(2);
  Mat<Rat> a2(2, 2);
  a2(0, 1) = -1;
  a2(1, 0) = 1;
  return Operator(2, 2, 2, {a1, a2}, "cauchy_riemann");
}

/// Deviatoric (trace-free) symmetrized gradient. For n = 2 the image is the
/// 2-dimensional space [[a, b], [b, -a]] with coordinates (a, b) and Gram
/// diag(2, 2); for n = 3 the coordinates are (w11, w22, w12, w13, w23) with
/// w33 = -w11 - w22 eliminated, Gram [[2,1],[1,2]] (+) diag(2,2,2).
inline Operator make_dev_sym_gradient(int n) {
  if (n == 2) {
    Mat<Rat> a1(2, 2), a2(2, 2);
    a1(0, 0) = Rat(1, 2);   // a = (d1 u1 - d2 u2)/2
    a1(1, 1) = Rat(1, 2);   // b = (d1 u2 + d2 u1)/2
    a2(0, 1) = Rat(-1, 2);
    a2(1, 0) = Rat(1, 2);
    Mat<Rat> gram(2, 2);
    gram(0, 0) = 2;
    gram(1, 1) = 2;
    return Operator(2, 2, 2, {a1, a2}, "dev_sym_gradient2d", gram);
  }
  if (n == 3) {
    // rows: w11, w22, w12, w13, w23 of eps(u) - div(u)/3 I
    std::vector<Mat<Rat>> a(3, Mat<Rat>(5, 3));
    for (int i = 0; i < 3; ++i)
      for (int d = 0; d < 2; ++d)  // diagonal rows w11, w22
        a[i](d, i) = (i == d) ? Rat(2, 3) : Rat(-1, 3);
    int row = 2;
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (const auto& pq : pairs) {
      a[pq[0]](row, pq[1]) = Rat(1, 2);
      a[pq[1]](row, pq[0]) = Rat(1, 2);
      ++row;
    }
    // |E|_F^2 with w33 = -w11 - w22: 2 w11^2 + 2 w22^2 + 2 w11 w22 + 2(off^2)
    Mat<Rat> gram(5, 5);
    gram(0, 0) = 2;
    gram(1, 1) = 2;
    gram(0, 1) = 1;
    gram(1, 0) = 1;
    for (int i = 2; i < 5; ++i) gram(i, i) = 2;
    return Operator(3, 3, 5, std::move(a), "dev_sym_gradient3d", gram);
  }
  throw ValidationError("make_dev_sym_gradient: n must be 2 or 3");
}

/// Known verdicts, derived by this toolkit and cross-checked against the
/// literature; a catalog run fails when the pipeline disagrees.
struct ExpectedVerdicts {
  std::optional<bool> r_elliptic;
  std::optional<bool> c_elliptic;
  std::optional<int> rank;  // constant rank value; nullopt = don't check
  std::optional<bool> mixing_holds;
  std::optional<bool> rank_one;
  std::optional<std::vector<int>> kernel_dims;  // per degree 0..4
  std::optional<int> stabilization;             // -1: not stabilized by 4
  std::string provenance;
};

struct CatalogEntry {
  Operator op;
  ExpectedVerdicts expected;
};

inline std::vector<CatalogEntry> builtin_catalog() {
  std::vector<CatalogEntry> cat;
  cat.push_back({make_gradient(2),
                 {true, true, 1, true, true, std::vector<int>{1, 1, 1, 1, 1}, 0,
                  "derived by this toolkit; scalar gradient"}});
  cat.push_back({make_gradient(3),
                 {true, true, 1, true, true, std::vector<int>{1, 1, 1, 1, 1}, 0,
                  "derived by this toolkit; scalar gradient"}});
  cat.push_back({make_sym_gradient(2),
                 {true, true, 2, true, true, std::vector<int>{2, 3, 3, 3, 3}, 1,
                  "derived by this toolkit; rigid motions kernel"}});
  cat.push_back({make_sym_gradient(3),
                 {true, true, 3, true, true, std::vector<int>{3, 6, 6, 6, 6}, 1,
                  "derived by this toolkit; rigid motions kernel"}});
  cat.push_back({make_divergence(2),
                 {false, false, 1, false, false, std::nullopt, -1,
                  "derived by this toolkit; underdetermined symbol"}});
  cat.push_back({make_cauchy_riemann(),
                 {true, false, 2, false, std::nullopt,
                  std::vector<int>{2, 4, 6, 8, 10}, -1,
                  "derived by this toolkit; holomorphic kernel growth"}});
  cat.push_back({make_dev_sym_gradient(2),
                 {true, false, 2, false, std::nullopt,
                  std::vector<int>{2, 4, 6, 8, 10}, -1,
                  "derived by this toolkit; planar conformal kernel growth"}});
  // C-elliptic, yet mixing fails: trace-free symmetric matrices are never
  // rank one (tr(a (x) a) = |a|^2), so the spectrum is empty.
  cat.push_back({make_dev_sym_gradient(3),
                 {true, true, 3, false, false, std::vector<int>{3, 7, 10, 10, 10}, 2,
                  "derived by this toolkit; conformal Killing fields"}});
  return cat;
}

}  // namespace opcert
