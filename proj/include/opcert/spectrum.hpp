#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "opcert/certify.hpp"
#include "opcert/operator.hpp"

namespace opcert {

/// (w*, xi, v*) with the exact identity pullback_tensor(w*) = xi (x) v*.
struct RankOneTriple {
  Vec<Rat> w_star;
  Vec<Rat> xi;
  Vec<Rat> v_star;
};

/// Exact re-verification: the matrix identity plus (W_A)* membership.
inline bool verify_rank_one_triple(const Operator& op, const RankOneTriple& t) {
  if (static_cast<int>(t.w_star.size()) != op.dim_w() ||
      static_cast<int>(t.xi.size()) != op.n() ||
      static_cast<int>(t.v_star.size()) != op.dim_v())
    return false;
  if (!op.in_wa_dual(t.w_star)) return false;
  Mat<Rat> g = pullback_tensor(op, t.w_star);
  for (int i = 0; i < op.n(); ++i)
    for (int j = 0; j < op.dim_v(); ++j)
      if (g(i, j) != t.xi[i] * t.v_star[j]) return false;
  return true;
}

struct RankOneFactor {
  bool zero = false;  // g_A(w*) = 0: the degenerate factorization
  Vec<Rat> xi;
  Vec<Rat> v_star;
};

/// Factor g_A(w*) = xi (x) v* when the pullback is a rank-one tensor.
/// Normalization: the first nonzero entry of xi is 1. Returns nullopt
/// when some 2x2 minor of the pullback is nonzero.
inline std::optional<RankOneFactor> is_rank_one_vector(const Operator& op,
                                                       const Vec<Rat>& w_star) {
  Mat<Rat> g = pullback_tensor(op, w_star);
  if (g.all_zero()) return RankOneFactor{true, {}, {}};
  for (int i1 = 0; i1 < g.rows(); ++i1)
    for (int i2 = i1 + 1; i2 < g.rows(); ++i2)
      for (int j1 = 0; j1 < g.cols(); ++j1)
        for (int j2 = j1 + 1; j2 < g.cols(); ++j2)
          if (g(i1, j1) * g(i2, j2) - g(i1, j2) * g(i2, j1) != 0)
            return std::nullopt;
  // first nonzero column carries xi up to scale
  int j0 = -1;
  for (int j = 0; j < g.cols() && j0 < 0; ++j)
    for (int i = 0; i < g.rows(); ++i)
      if (g(i, j) != 0) { j0 = j; break; }
  Vec<Rat> col = g.col(j0);
  int i1 = 0;
  while (col[i1] == 0) ++i1;
  RankOneFactor f;
  f.xi = (Rat(1) / col[i1]) * col;
  f.v_star = g.row(i1);  // row i1 = xi_{i1} v* = v* after normalization
  return f;
}

namespace detail {

/// The pullback map as a matrix: vec(g_A(u)) = P u with the row-major
/// vec layout of vec_outer.
inline Mat<Rat> pullback_matrix(const Operator& op) {
  Mat<Rat> p(op.n() * op.dim_v(), op.dim_w());
  for (int i = 0; i < op.n(); ++i)
    for (int j = 0; j < op.dim_v(); ++j)
      for (int m = 0; m < op.dim_w(); ++m)
        p(i * op.dim_v() + j, m) = op.coeff(i)(m, j);
  return p;
}

/// Stack the pullback system with the (W_A)* membership constraints.
inline Mat<Rat> pullback_system(const Operator& op) {
  const Mat<Rat>& z = op.wa_dual_constraints();
  Mat<Rat> p = pullback_matrix(op);
  Mat<Rat> sys(p.rows() + z.rows(), op.dim_w());
  for (int i = 0; i < p.rows(); ++i)
    for (int j = 0; j < op.dim_w(); ++j) sys(i, j) = p(i, j);
  for (int i = 0; i < z.rows(); ++i)
    for (int j = 0; j < op.dim_w(); ++j) sys(p.rows() + i, j) = z(i, j);
  return sys;
}

/// w* in (W_A)* with g_A(w*) = xi (x) v*, if one exists. Unique by the
/// injectivity of g_A on (W_A)*.
inline std::optional<Vec<Rat>> realize_spectrum_pair(const Operator& op,
                                                     const Vec<Rat>& xi,
                                                     const Vec<Rat>& v_star) {
  Mat<Rat> sys = pullback_system(op);
  Vec<Rat> rhs = vec_outer(xi, v_star);
  rhs.resize(sys.rows(), Rat(0));
  return solve(sys, rhs);
}

inline Vec<Rat> apply_coeff_transpose(const Operator& op, int i,
                                      const Vec<Rat>& w_star) {
  Vec<Rat> out(op.dim_v(), Rat(0));
  for (int j = 0; j < op.dim_v(); ++j)
    for (int m = 0; m < op.dim_w(); ++m) out[j] += w_star[m] * op.coeff(i)(m, j);
  return out;
}

}  // namespace detail

/// All rank-one vectors with the prescribed v*-factor: the exact solution
/// space of {w* in (W_A)* : A_i^T w* parallel to v* for all i}, one verified
/// triple per kernel basis element (zero-xi degenerates discarded).
inline std::vector<RankOneTriple> rank_one_from_v(const Operator& op,
                                                  const Vec<Rat>& v_star) {
  if (static_cast<int>(v_star.size()) != op.dim_v() || vec_is_zero(v_star))
    throw ValidationError("rank_one_from_v: v* must be a nonzero V* vector");
  int n = op.n(), nv = op.dim_v(), m = op.dim_w();
  std::vector<Vec<Rat>> rows;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < nv; ++j)
      for (int k = j + 1; k < nv; ++k) {
        // (A_i^T u)_j v*_k - (A_i^T u)_k v*_j = 0
        Vec<Rat> row(m, Rat(0));
        for (int mm = 0; mm < m; ++mm)
          row[mm] = op.coeff(i)(mm, j) * v_star[k] - op.coeff(i)(mm, k) * v_star[j];
        rows.push_back(std::move(row));
      }
  const Mat<Rat>& z = op.wa_dual_constraints();
  for (int i = 0; i < z.rows(); ++i) rows.push_back(z.row(i));
  Mat<Rat> sys(static_cast<int>(rows.size()), m);
  for (size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < m; ++j) sys(int(i), j) = rows[i][j];

  int j0 = 0;
  while (v_star[j0] == 0) ++j0;
  std::vector<RankOneTriple> out;
  for (auto& w : rows.empty() ? nullspace(Mat<Rat>(1, m)) : nullspace(sys)) {
    Vec<Rat> xi(n, Rat(0));
    for (int i = 0; i < n; ++i)
      xi[i] = detail::apply_coeff_transpose(op, i, w)[j0] / v_star[j0];
    if (vec_is_zero(xi)) continue;
    RankOneTriple t{std::move(w), std::move(xi), v_star};
    if (verify_rank_one_triple(op, t)) out.push_back(std::move(t));
  }
  return out;
}

/// All rank-one vectors with the prescribed direction factor xi.
inline std::vector<RankOneTriple> rank_one_from_xi(const Operator& op,
                                                   const Vec<Rat>& xi) {
  if (static_cast<int>(xi.size()) != op.n() || vec_is_zero(xi))
    throw ValidationError("rank_one_from_xi: xi must be a nonzero direction");
  int n = op.n(), nv = op.dim_v(), m = op.dim_w();
  std::vector<Vec<Rat>> rows;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int c = 0; c < nv; ++c) {
        // xi_j (A_i^T u)_c - xi_i (A_j^T u)_c = 0
        Vec<Rat> row(m, Rat(0));
        for (int mm = 0; mm < m; ++mm)
          row[mm] = xi[j] * op.coeff(i)(mm, c) - xi[i] * op.coeff(j)(mm, c);
        rows.push_back(std::move(row));
      }
  const Mat<Rat>& z = op.wa_dual_constraints();
  for (int i = 0; i < z.rows(); ++i) rows.push_back(z.row(i));
  Mat<Rat> sys(std::max<int>(1, static_cast<int>(rows.size())), m);
  for (size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < m; ++j) sys(int(i), j) = rows[i][j];

  int i0 = 0;
  while (xi[i0] == 0) ++i0;
  std::vector<RankOneTriple> out;
  for (auto& w : nullspace(sys)) {
    Vec<Rat> vs = detail::apply_coeff_transpose(op, i0, w);
    Rat inv = Rat(1) / xi[i0];
    for (auto& x : vs) x *= inv;
    if (vec_is_zero(vs)) continue;
    RankOneTriple t{std::move(w), xi, std::move(vs)};
    if (verify_rank_one_triple(op, t)) out.push_back(std::move(t));
  }
  return out;
}

enum class MixingVerdict { holds, fails, indeterminate };

struct MixingCertificate {
  MixingVerdict verdict = MixingVerdict::indeterminate;
  bool certified = false;  // meaningful for verdict == fails
  // positive witness: hyperplane normals and the exact bases of
  // S_j = span{A(eta)v : eta in xi_j-perp, v in V} whose intersection is {0}
  std::vector<Vec<Rat>> hyperplane_normals;
  std::vector<std::vector<Vec<Rat>>> subspace_bases;
  // negative witness: nonzero w surviving every sampled family
  std::optional<Vec<Rat>> surviving_w;
  int sampled = 0;
  std::vector<int> sampled_dims;
  double sigma_s_lower = 0.0;  // for the certified-fail rank bound
};

namespace detail {

/// Exact basis of S = span{A(eta)v : eta perp xi, v in V}.
inline std::vector<Vec<Rat>> hyperplane_image_span(const Operator& op,
                                                   const Vec<Rat>& xi) {
  Mat<Rat> normal(1, op.n());
  for (int i = 0; i < op.n(); ++i) normal(0, i) = xi[i];
  auto etas = nullspace(normal);
  std::vector<Vec<Rat>> cols;
  for (const auto& eta : etas) {
    Mat<Rat> s = eval_symbol(op, eta);
    for (int j = 0; j < op.dim_v(); ++j) cols.push_back(s.col(j));
  }
  if (cols.empty()) return {};
  return column_space_basis(from_columns(op.dim_w(), cols));
}

/// Deterministic hyperplane-normal candidates: coordinate directions,
/// +-1 sign vectors (first coordinate fixed positive), then pseudorandom.
inline std::vector<Vec<Rat>> normal_candidates(int n, int budget) {
  std::vector<Vec<Rat>> out;
  for (int i = 0; i < n && static_cast<int>(out.size()) < budget; ++i)
    out.push_back(unit_vec(n, i));
  for (int mask = 0; mask < (1 << (n - 1)) && static_cast<int>(out.size()) < budget;
       ++mask) {
    Vec<Rat> v(n, Rat(1));
    for (int i = 0; i < n - 1; ++i)
      if ((mask >> i) & 1) v[i + 1] = -1;
    out.push_back(std::move(v));
  }
  for (int k = 0; static_cast<int>(out.size()) < budget; ++k)
    out.push_back(generic_rational_point(n, k + 17));
  return out;
}

}  // namespace detail

/// Decides the algebraic mixing condition: the intersection over
/// hyperplanes pi of span{A(eta)v : eta in pi, v in V} is {0}.
/// "holds" is sound with a finite family (the full intersection is
/// contained in any subfamily's); "fails" is certified only by the
/// symbolic rank argument on M(xi) = [A(xi_i e_j - xi_j e_i)].
inline MixingCertificate check_mixing(const Operator& op,
                                      const CertifyBudget& budget = {}) {
  MixingCertificate cert;
  if (op.n() == 1) {
    // the only hyperplane is {0}; its image span is trivial
    cert.verdict = MixingVerdict::holds;
    cert.hyperplane_normals.push_back(unit_vec(1, 0));
    cert.subspace_bases.push_back({});
    return cert;
  }

  int cand_budget = op.n() * op.n() + 50;
  auto candidates = detail::normal_candidates(op.n(), cand_budget);
  std::vector<Vec<Rat>> running;
  bool first = true;
  for (const auto& xi : candidates) {
    auto s = detail::hyperplane_image_span(op, xi);
    ++cert.sampled;
    cert.sampled_dims.push_back(static_cast<int>(s.size()));
    cert.hyperplane_normals.push_back(xi);
    cert.subspace_bases.push_back(s);
    if (first) {
      running = s;
      first = false;
    } else {
      running = intersect_spans(op.dim_w(), running, s);
    }
    if (running.empty()) {
      cert.verdict = MixingVerdict::holds;
      return cert;
    }
  }

  cert.surviving_w = running.front();
  cert.verdict = MixingVerdict::fails;
  cert.certified = false;

  // Certified upgrade. The columns of M(xi) = [A(xi_i e_j - xi_j e_i) e_v]
  // span S_{xi-perp} for xi != 0. If all (s+1)-minors of [M(xi) | w] vanish
  // identically and sigma_s(M(xi)) >= c > 0 on the sphere, then
  // w lies in S_pi for every hyperplane pi.
  int s_dim = cert.sampled_dims.front();
  for (int d : cert.sampled_dims)
    if (d != s_dim) {
      cert.verdict = MixingVerdict::indeterminate;
      return cert;
    }

  int n = op.n(), nv = op.dim_v(), m = op.dim_w();
  int pairs = n * (n - 1) / 2;
  const Vec<Rat>& w = *cert.surviving_w;

  // symbolic augmented matrix [M(xi) | w]
  Mat<Poly> aug(m, pairs * nv + 1);
  {
    int col = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int v = 0; v < nv; ++v, ++col)
          for (int r = 0; r < m; ++r) {
            Poly p;
            if (op.coeff(j)(r, v) != 0) p += Poly::variable(n, i, op.coeff(j)(r, v));
            if (op.coeff(i)(r, v) != 0) p -= Poly::variable(n, j, op.coeff(i)(r, v));
            aug(r, col) = std::move(p);
          }
    for (int r = 0; r < m; ++r) aug(r, pairs * nv) = Poly::constant(n, w[r]);
  }
  int minor_size = s_dim + 1;
  bool minors_ok = true;
  if (minor_size <= std::min(m, pairs * nv + 1)) {
    detail::for_each_combination(m, minor_size, [&](const std::vector<int>& rows) {
      if (!minors_ok) return;
      // only minors that involve the w column matter
      detail::for_each_combination(pairs * nv, minor_size - 1,
                                   [&](const std::vector<int>& cols) {
        if (!minors_ok) return;
        Mat<Poly> sub(minor_size, minor_size);
        for (int i = 0; i < minor_size; ++i) {
          for (int j = 0; j + 1 < minor_size; ++j) sub(i, j) = aug(rows[i], cols[j]);
          sub(i, minor_size - 1) = aug(rows[i], pairs * nv);
        }
        if (!det_laplace(sub).is_zero()) minors_ok = false;
      });
    });
  }
  if (!minors_ok) {
    // w falls out of S_pi for some symbolic pi: contradicts survival at the
    // sampled family only if ranks drop; leave the fail uncertified.
    return cert;
  }

  // sigma_s lower bound for M(xi) over the sphere
  std::vector<Mat<Rat>> c_mats(n, Mat<Rat>(m, pairs * nv));
  {
    int col = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int v = 0; v < nv; ++v, ++col)
          for (int r = 0; r < m; ++r) {
            c_mats[i](r, col) += op.coeff(j)(r, v);
            c_mats[j](r, col) -= op.coeff(i)(r, v);
          }
  }
  try {
    Operator aux(n, pairs * nv, m, c_mats, "mixing-aux");
    detail::FloatSymbol fs(aux);
    SphereMinOptions opts;
    opts.tol = budget.tol;
    opts.max_boxes = budget.max_boxes;
    opts.quality_gap = 1e-3;
    SphereBnB bnb(n,
                  [&](const std::vector<double>& x) {
                    return detail::singular_value_from_top(fs.at(x), s_dim);
                  },
                  fs.lipschitz, opts);
    SphereMinResult res = bnb.run();
    if (res.complete && res.certified_lower >= budget.tol) {
      cert.certified = true;
      cert.sigma_s_lower = res.certified_lower;
    }
  } catch (const ValidationError&) {
    // aux operator degenerate; leave uncertified
  }
  return cert;
}

struct SpectrumSpan {
  std::vector<RankOneTriple> triples;
  int span_dim = 0;
  int target_dim = 0;
  bool complete = false;
};

struct RankOneReport {
  SpectrumSpan span;
  MixingCertificate mixing;
  bool consistent = true;
};

namespace detail {

inline std::vector<Vec<Rat>> sweep_candidates(int dim, int budget) {
  std::vector<Vec<Rat>> out;
  for (int j = 0; j < dim && static_cast<int>(out.size()) < budget; ++j)
    out.push_back(unit_vec(dim, j));
  for (int j = 0; j < dim; ++j)
    for (int k = j + 1; k < dim && static_cast<int>(out.size()) < budget; ++k) {
      Vec<Rat> s = unit_vec(dim, j) + unit_vec(dim, k);
      out.push_back(std::move(s));
      Vec<Rat> d = unit_vec(dim, j) - unit_vec(dim, k);
      if (static_cast<int>(out.size()) < budget) out.push_back(std::move(d));
    }
  for (int k = 0; static_cast<int>(out.size()) < budget; ++k)
    out.push_back(generic_rational_point(dim, k + 29));
  return out;
}

}  // namespace detail

/// Sweeps structured candidates through rank_one_from_v / rank_one_from_xi
/// until the span of witnessed rank-one vectors reaches dim (W_A)* or the
/// budget runs out; cross-checks the result against check_mixing.
inline RankOneReport check_rank_one_property(const Operator& op,
                                             const CertifyBudget& budget = {}) {
  RankOneReport rep;
  rep.span.target_dim = op.wa_space().dim();

  std::vector<Vec<Rat>> span_vectors;
  auto try_add = [&](RankOneTriple t) {
    if (rep.span.complete) return;
    std::vector<Vec<Rat>> extended = span_vectors;
    extended.push_back(t.w_star);
    Mat<Rat> m = from_columns(op.dim_w(), extended);
    if (rank(m) > static_cast<int>(span_vectors.size())) {
      span_vectors.push_back(t.w_star);
      rep.span.triples.push_back(std::move(t));
      rep.span.span_dim = static_cast<int>(span_vectors.size());
      rep.span.complete = rep.span.span_dim == rep.span.target_dim;
    }
  };

  for (const auto& v : detail::sweep_candidates(op.dim_v(), op.dim_v() * op.dim_v() + 50)) {
    if (rep.span.complete) break;
    for (auto& t : rank_one_from_v(op, v)) try_add(std::move(t));
  }
  for (const auto& xi : detail::sweep_candidates(op.n(), op.n() * op.n() + 50)) {
    if (rep.span.complete) break;
    for (auto& t : rank_one_from_xi(op, xi)) try_add(std::move(t));
  }

  rep.mixing = check_mixing(op, budget);
  // A complete span is a positive certificate; a certified mixing failure
  // is a negative one. Both determinate and disagreeing is a soundness bug.
  if (rep.span.complete && rep.mixing.verdict == MixingVerdict::fails)
    rep.consistent = false;
  return rep;
}

/// Quadratic-in-lambda witness: pullback(w0 + l w1 + l^2 w2) =
/// (xi + l eta) (x) (e + gamma l f) as a polynomial identity.
struct PolarizationWitness {
  Rat gamma;
  Vec<Rat> w0, w1, w2;
  Vec<Rat> xi, e_star, eta, f_star;
};

struct PolarizeError : std::runtime_error {
  explicit PolarizeError(const std::string& msg,
                         std::vector<std::pair<Rat, Rat>> conds = {})
      : std::runtime_error(msg), gamma_conditions(std::move(conds)) {}
  // linear solvability conditions alpha*gamma + beta = 0
  std::vector<std::pair<Rat, Rat>> gamma_conditions;
};

inline bool verify_polarization(const Operator& op, const PolarizationWitness& w) {
  // match coefficients of lambda^0, lambda^1, lambda^2
  Vec<Rat> l0 = vec_outer(w.xi, w.e_star);
  Vec<Rat> l1 = vec_outer(w.xi, w.gamma * w.f_star) + vec_outer(w.eta, w.e_star);
  Vec<Rat> l2 = vec_outer(w.eta, w.gamma * w.f_star);
  return vec_of_matrix(pullback_tensor(op, w.w0)) == l0 &&
         vec_of_matrix(pullback_tensor(op, w.w1)) == l1 &&
         vec_of_matrix(pullback_tensor(op, w.w2)) == l2 &&
         op.in_wa_dual(w.w0) && op.in_wa_dual(w.w1) && op.in_wa_dual(w.w2);
}

inline PolarizationWitness polarize(const Operator& op,
                                    std::pair<Vec<Rat>, Vec<Rat>> pair1,
                                    std::pair<Vec<Rat>, Vec<Rat>> pair2) {
  const auto& [xi, e] = pair1;
  const auto& [eta, f] = pair2;
  auto w_xe = detail::realize_spectrum_pair(op, xi, e);
  if (!w_xe) throw PolarizeError("pair1 is not in the directional spectrum");
  auto w_hf = detail::realize_spectrum_pair(op, eta, f);
  if (!w_hf) throw PolarizeError("pair2 is not in the directional spectrum");

  PolarizationWitness wit;
  wit.xi = xi;
  wit.e_star = e;
  wit.eta = eta;
  wit.f_star = f;

  auto parallel_factor = [](const Vec<Rat>& a, const Vec<Rat>& b)
      -> std::optional<Rat> {
    // b = c a, exactly
    int i0 = -1;
    for (size_t i = 0; i < a.size(); ++i)
      if (a[i] != 0) { i0 = int(i); break; }
    if (i0 < 0) return std::nullopt;
    Rat c = b[i0] / a[i0];
    for (size_t i = 0; i < a.size(); ++i)
      if (b[i] != c * a[i]) return std::nullopt;
    return c;
  };

  // Degenerate (trivial-branch) cases: gamma = 1.
  if (auto c = parallel_factor(e, f); c && *c != 0) {
    Vec<Rat> w_he = (Rat(1) / *c) * (*w_hf);  // realizes eta (x) e
    wit.gamma = 1;
    wit.w0 = *w_xe;
    wit.w1 = w_he + *c * (*w_xe);
    wit.w2 = *c * w_he;
    if (!verify_polarization(op, wit))
      throw PolarizeError("degenerate polarization failed exact verification");
    return wit;
  }
  if (auto c = parallel_factor(xi, eta); c && *c != 0) {
    Vec<Rat> w_xf = (Rat(1) / *c) * (*w_hf);  // realizes xi (x) f
    wit.gamma = 1;
    wit.w0 = *w_xe;
    wit.w1 = *c * (*w_xe) + w_xf;
    wit.w2 = *c * w_xf;
    if (!verify_polarization(op, wit))
      throw PolarizeError("degenerate polarization failed exact verification");
    return wit;
  }

  // General case: the lambda^1 coefficient system
  //   pullback(w1) = eta (x) e + gamma * xi (x) f
  // is solvable iff every left-nullspace functional of the system matrix
  // annihilates the right-hand side; each gives a linear condition in gamma.
  Mat<Rat> sys = detail::pullback_system(op);
  Vec<Rat> b0 = vec_outer(eta, e);
  Vec<Rat> b1 = vec_outer(xi, f);
  b0.resize(sys.rows(), Rat(0));
  b1.resize(sys.rows(), Rat(0));

  std::vector<std::pair<Rat, Rat>> conds;  // alpha*gamma + beta = 0
  for (const auto& y : nullspace(sys.transpose())) {
    Rat alpha = dot(y, b1), beta = dot(y, b0);
    if (alpha == 0 && beta == 0) continue;
    conds.emplace_back(alpha, beta);
  }
  Rat gamma;
  bool have_gamma = false;
  for (const auto& [alpha, beta] : conds) {
    if (alpha == 0) throw PolarizeError("no gamma solves the coefficient system", conds);
    Rat g = -beta / alpha;
    if (have_gamma && g != gamma)
      throw PolarizeError("inconsistent gamma conditions", conds);
    gamma = g;
    have_gamma = true;
  }
  if (!have_gamma) gamma = 1;  // unconstrained
  if (gamma == 0)
    throw PolarizeError("coefficient system forces gamma = 0", conds);

  Vec<Rat> rhs(sys.rows());
  for (size_t i = 0; i < rhs.size(); ++i) rhs[i] = b0[i] + gamma * b1[i];
  auto w1 = solve(sys, rhs);
  if (!w1) throw PolarizeError("lambda^1 system unsolvable at computed gamma", conds);

  wit.gamma = gamma;
  wit.w0 = *w_xe;
  wit.w1 = *w1;
  wit.w2 = gamma * (*w_hf);
  if (!verify_polarization(op, wit))
    throw PolarizeError("polarization witness failed exact verification", conds);
  return wit;
}

struct SurjectivityProbe {
  bool ran = false;
  std::string refusal;
  int checked_xi = 0, checked_v = 0;
  std::vector<std::string> violations;
};

/// Checks the spectrum-projection surjectivity on samples. Requires an
/// elliptic, rank-one operator (caller-supplied verdicts); refuses otherwise.
inline SurjectivityProbe spectrum_surjectivity_probe(
    const Operator& op, bool elliptic, bool rank_one,
    const std::vector<Vec<Rat>>& xi_samples,
    const std::vector<Vec<Rat>>& v_samples) {
  SurjectivityProbe probe;
  if (!elliptic || !rank_one) {
    probe.refusal = "operator must be elliptic and rank-one";
    return probe;
  }
  probe.ran = true;
  for (const auto& xi : xi_samples) {
    ++probe.checked_xi;
    if (vec_is_zero(xi)) continue;
    if (rank_one_from_xi(op, xi).empty())
      probe.violations.push_back("no rank-one vector for sampled xi #" +
                                 std::to_string(probe.checked_xi));
  }
  for (const auto& v : v_samples) {
    ++probe.checked_v;
    if (vec_is_zero(v)) continue;
    if (rank_one_from_v(op, v).empty())
      probe.violations.push_back("no rank-one vector for sampled v* #" +
                                 std::to_string(probe.checked_v));
  }
  return probe;
}

}  // namespace opcert
