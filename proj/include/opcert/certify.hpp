#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "opcert/bnb.hpp"
#include "opcert/operator.hpp"
#include "opcert/poly.hpp"

namespace opcert {

enum class Verdict { elliptic, not_elliptic, indeterminate };
enum class RankVerdict { constant_rank, not_constant_rank, indeterminate };

struct CertifyBudget {
  double tol = 1e-8;
  long long max_boxes = 10000000;
  double quality_gap = 1e-6;
};

struct EllipticityCertificate {
  char kind = 'R';  // 'R' or 'C'
  Verdict verdict = Verdict::indeterminate;
  double lower_bound = 0.0;  // certified iff verdict == elliptic
  double tol = 0.0;
  double lipschitz = 0.0;
  long long boxes_used = 0;
  long long budget = 0;
  // Exact witness of a kernel direction (imaginary parts zero for kind R).
  std::optional<Vec<GRat>> witness_xi;
  std::optional<Vec<GRat>> witness_kernel;
  // Floating candidate attached when rationalization failed.
  std::optional<std::vector<double>> float_candidate;
  double candidate_sigma = 0.0;
};

struct RankCertificate {
  RankVerdict verdict = RankVerdict::indeterminate;
  int r = 0;
  bool minors_vacuous = false;  // r == min(M, N): no (r+1)-minors exist
  long long minor_count = 0;
  bool minors_vanish = false;
  double sigma_r_lower = 0.0;  // certified iff verdict == constant_rank
  double lipschitz = 0.0;
  long long boxes_used = 0;
  long long budget = 0;
  std::optional<Vec<Rat>> generic_point;
  std::optional<Vec<Rat>> drop_point;  // exact point with a different rank
  int drop_rank = -1;
};

struct PolyKernel {
  int d_max = 0;
  std::vector<int> dims;  // kernel dimension per degree, index 0..d_max
  std::optional<int> stabilization_degree;
  std::vector<std::vector<Poly>> basis;  // each element: N component polys
};

namespace detail {

/// Floating coefficient matrices L*A_i where G = L^T L (Gram-corrected
/// norm on W), plus the Frobenius Lipschitz constant for the symbol.
struct FloatSymbol {
  std::vector<Eigen::MatrixXd> la;
  double lipschitz = 0.0;
  int n = 0, dim_v = 0, dim_w = 0;

  explicit FloatSymbol(const Operator& op)
      : n(op.n()), dim_v(op.dim_v()), dim_w(op.dim_w()) {
    Eigen::MatrixXd g(dim_w, dim_w);
    for (int i = 0; i < dim_w; ++i)
      for (int j = 0; j < dim_w; ++j) g(i, j) = to_double(op.gram()(i, j));
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    Eigen::MatrixXd l = llt.matrixU();  // G = U^T U, weight by U
    double sum = 0;
    la.reserve(n);
    for (int k = 0; k < n; ++k) {
      Eigen::MatrixXd a(dim_w, dim_v);
      for (int i = 0; i < dim_w; ++i)
        for (int j = 0; j < dim_v; ++j) a(i, j) = to_double(op.coeff(k)(i, j));
      a = l * a;
      sum += a.squaredNorm();
      la.push_back(std::move(a));
    }
    lipschitz = std::sqrt(sum);
  }

  Eigen::MatrixXd at(const std::vector<double>& xi) const {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dim_w, dim_v);
    for (int k = 0; k < n; ++k) b += xi[k] * la[k];
    return b;
  }
  // xi packed as (re_1..re_n, im_1..im_n)
  Eigen::MatrixXcd at_complex(const std::vector<double>& xi) const {
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(dim_w, dim_v);
    for (int k = 0; k < n; ++k)
      b += std::complex<double>(xi[k], xi[n + k]) * la[k];
    return b;
  }
};

inline Eigen::VectorXd eigenvalues_sym(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  if (s.rows() <= 3)
    es.computeDirect(s, Eigen::EigenvaluesOnly);
  else
    es.compute(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// k-th largest singular value (k = 1-based; k = min(M,N)+1..N count as 0).
inline double singular_value_from_top(const Eigen::MatrixXd& b, int k) {
  Eigen::MatrixXd s = (b.rows() >= b.cols()) ? Eigen::MatrixXd(b.transpose() * b)
                                             : Eigen::MatrixXd(b * b.transpose());
  Eigen::VectorXd ev = eigenvalues_sym(s);  // ascending
  int m = static_cast<int>(ev.size());
  int idx = m - k;
  if (idx < 0) return 0.0;
  return std::sqrt(std::max(0.0, ev(idx)));
}

/// Smallest of the N singular values of the M x N matrix (0 when M < N);
/// this is the injectivity modulus min |Bv| / |v|.
inline double injectivity_sigma(const Eigen::MatrixXd& b) {
  if (b.rows() < b.cols()) return 0.0;
  Eigen::VectorXd ev = eigenvalues_sym(b.transpose() * b);
  return std::sqrt(std::max(0.0, ev(0)));
}

inline double injectivity_sigma_c(const Eigen::MatrixXcd& b) {
  if (b.rows() < b.cols()) return 0.0;
  Eigen::MatrixXcd s = b.adjoint() * b;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues()(0)));
}

/// Alternating minimization of |A(xi)v| over unit xi, v. Converges to a
/// local minimum of the injectivity modulus; used to polish candidates
/// and to obtain tight upper bounds for the bound-refinement ladder.
inline std::pair<std::vector<double>, double> polish_real(
    const FloatSymbol& fs, std::vector<double> xi, int iters = 80) {
  for (int it = 0; it < iters; ++it) {
    Eigen::MatrixXd b = fs.at(xi);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.transpose() * b);
    Eigen::VectorXd v = es.eigenvectors().col(0);
    // |A(x)v|^2 = x^T Q x with Q_jk = (LA_j v) . (LA_k v)
    Eigen::MatrixXd q(fs.n, fs.n);
    std::vector<Eigen::VectorXd> c(fs.n);
    for (int j = 0; j < fs.n; ++j) c[j] = fs.la[j] * v;
    for (int j = 0; j < fs.n; ++j)
      for (int k = 0; k < fs.n; ++k) q(j, k) = c[j].dot(c[k]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eq(q);
    Eigen::VectorXd x = eq.eigenvectors().col(0);
    for (int j = 0; j < fs.n; ++j) xi[j] = x(j);
  }
  return {xi, injectivity_sigma(fs.at(xi))};
}

inline std::pair<std::vector<double>, double> polish_complex(
    const FloatSymbol& fs, std::vector<double> xi, int iters = 80) {
  for (int it = 0; it < iters; ++it) {
    Eigen::MatrixXcd b = fs.at_complex(xi);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b.adjoint() * b);
    Eigen::VectorXcd v = es.eigenvectors().col(0);
    Eigen::MatrixXcd h(fs.n, fs.n);
    std::vector<Eigen::VectorXcd> c(fs.n);
    for (int j = 0; j < fs.n; ++j) c[j] = fs.la[j] * v;
    for (int j = 0; j < fs.n; ++j)
      for (int k = 0; k < fs.n; ++k) h(j, k) = c[j].dot(c[k]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eh(h);
    Eigen::VectorXcd x = eh.eigenvectors().col(0);
    for (int j = 0; j < fs.n; ++j) {
      xi[j] = x(j).real();
      xi[fs.n + j] = x(j).imag();
    }
  }
  return {xi, injectivity_sigma_c(fs.at_complex(xi))};
}

/// Normalize a floating direction by its largest-modulus coordinate and
/// rationalize componentwise. Singular directions of desk-scale operators
/// are typically (Gaussian-)rational after this normalization.
inline std::optional<Vec<GRat>> rationalize_direction(
    const std::vector<double>& point, int n, bool complex_case,
    std::int64_t max_den = 1000000) {
  std::vector<std::complex<double>> xi(n);
  for (int i = 0; i < n; ++i)
    xi[i] = complex_case ? std::complex<double>(point[i], point[n + i])
                         : std::complex<double>(point[i], 0.0);
  int imax = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(xi[i]) > std::abs(xi[imax])) imax = i;
  if (std::abs(xi[imax]) < 1e-12) return std::nullopt;
  Vec<GRat> out(n);
  for (const double acc : {1e-9, 1e-6}) {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      std::complex<double> y = xi[i] / xi[imax];
      auto re = rationalize(y.real(), max_den, acc);
      auto im = rationalize(y.imag(), max_den, acc);
      if (!re || !im) { ok = false; break; }
      out[i] = GRat(*re, *im);
    }
    if (ok) return out;
  }
  return std::nullopt;
}

inline std::vector<Vec<GRat>> complex_nullspace(const Operator& op,
                                                const Vec<GRat>& xi) {
  return nullspace(eval_symbol_complex(op, xi));
}

/// Deterministic generic rational points: entries in [1, 2] with distinct
/// prime denominators per point, advanced by a small LCG.
inline Vec<Rat> generic_rational_point(int n, int index) {
  static const int primes[] = {7, 11, 13, 17, 19, 23, 29, 31};
  int q = primes[index % 8];
  std::uint64_t state = 0x9e3779b97f4a7c15ull + 0x1234567ull * (index + 1);
  Vec<Rat> p(n);
  for (int i = 0; i < n; ++i) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    int num = q + static_cast<int>((state >> 33) % q);  // in [q, 2q)
    p[i] = Rat(num, q);
  }
  return p;
}

}  // namespace detail

inline EllipticityCertificate check_r_elliptic(const Operator& op,
                                               const CertifyBudget& budget = {}) {
  EllipticityCertificate cert;
  cert.kind = 'R';
  cert.tol = budget.tol;
  cert.budget = budget.max_boxes;

  // M < N: the symbol can never be injective; any direction witnesses.
  if (op.dim_w() < op.dim_v()) {
    Vec<Rat> xi = unit_vec(op.n(), 0);
    auto kernel = nullspace(eval_symbol(op, xi));
    cert.verdict = Verdict::not_elliptic;
    cert.witness_xi = Vec<GRat>(op.n());
    for (int i = 0; i < op.n(); ++i) (*cert.witness_xi)[i] = GRat(xi[i]);
    cert.witness_kernel = Vec<GRat>(op.dim_v());
    for (int j = 0; j < op.dim_v(); ++j)
      (*cert.witness_kernel)[j] = GRat(kernel.front()[j]);
    return cert;
  }

  detail::FloatSymbol fs(op);
  cert.lipschitz = fs.lipschitz;

  SphereMinOptions opts;
  opts.tol = budget.tol;
  opts.max_boxes = budget.max_boxes;
  opts.quality_gap = budget.quality_gap;
  SphereBnB bnb(op.n(),
                [&](const std::vector<double>& x) {
                  return detail::injectivity_sigma(fs.at(x));
                },
                fs.lipschitz, opts);
  bnb.set_candidate_hook([&](const std::vector<double>& p, double) {
    auto [pp, sigma] = detail::polish_real(fs, p);
    if (sigma >= budget.tol / 2) return false;
    auto xi = detail::rationalize_direction(pp, op.n(), false);
    if (!xi) {
      cert.float_candidate = pp;
      cert.candidate_sigma = sigma;
      return false;
    }
    auto kernel = detail::complex_nullspace(op, *xi);
    if (kernel.empty()) {
      cert.float_candidate = pp;
      cert.candidate_sigma = sigma;
      return false;
    }
    cert.witness_xi = *xi;
    cert.witness_kernel = kernel.front();
    return true;
  });

  // seed the polish with a few starts for a tight upper bound
  std::vector<std::vector<double>> seeds;
  for (int i = 0; i < op.n(); ++i) {
    std::vector<double> e(op.n(), 0.0);
    e[i] = 1.0;
    seeds.push_back(detail::polish_real(fs, e).first);
  }
  SphereMinResult res = bnb.run(seeds);
  cert.boxes_used = res.boxes;
  if (res.witness_found) {
    cert.verdict = Verdict::not_elliptic;
    cert.candidate_sigma = res.best_value;
  } else if (res.complete && res.certified_lower >= budget.tol) {
    cert.verdict = Verdict::elliptic;
    cert.lower_bound = res.certified_lower;
  } else {
    cert.verdict = Verdict::indeterminate;
    if (!cert.float_candidate) {
      cert.float_candidate = res.best_point;
      cert.candidate_sigma = res.best_value;
    }
  }
  return cert;
}

inline EllipticityCertificate check_c_elliptic(const Operator& op,
                                               const CertifyBudget& budget = {}) {
  EllipticityCertificate cert;
  cert.kind = 'C';
  cert.tol = budget.tol;
  cert.budget = budget.max_boxes;

  if (op.dim_w() < op.dim_v()) {
    Vec<GRat> xi(op.n());
    xi[0] = GRat(1);
    auto kernel = detail::complex_nullspace(op, xi);
    cert.verdict = Verdict::not_elliptic;
    cert.witness_xi = xi;
    cert.witness_kernel = kernel.front();
    return cert;
  }

  detail::FloatSymbol fs(op);
  // |A(da) + i A(db)|_F^2 = |A(da)|_F^2 + |A(db)|_F^2, so the real-case
  // Frobenius constant also covers the 2n-sphere parametrization.
  cert.lipschitz = fs.lipschitz;

  SphereMinOptions opts;
  opts.tol = budget.tol;
  opts.max_boxes = budget.max_boxes;
  opts.quality_gap = std::max(budget.quality_gap, 1e-3);
  SphereBnB bnb(2 * op.n(),
                [&](const std::vector<double>& x) {
                  return detail::injectivity_sigma_c(fs.at_complex(x));
                },
                fs.lipschitz, opts);
  bnb.set_candidate_hook([&](const std::vector<double>& p, double) {
    auto [pp, sigma] = detail::polish_complex(fs, p);
    if (sigma >= budget.tol / 2) return false;
    auto xi = detail::rationalize_direction(pp, op.n(), true);
    if (!xi) {
      cert.float_candidate = pp;
      cert.candidate_sigma = sigma;
      return false;
    }
    auto kernel = detail::complex_nullspace(op, *xi);
    if (kernel.empty()) {
      cert.float_candidate = pp;
      cert.candidate_sigma = sigma;
      return false;
    }
    cert.witness_xi = *xi;
    cert.witness_kernel = kernel.front();
    return true;
  });

  std::vector<std::vector<double>> seeds;
  for (int i = 0; i < 2 * op.n(); ++i) {
    std::vector<double> e(2 * op.n(), 0.0);
    e[i] = 1.0;
    seeds.push_back(detail::polish_complex(fs, e).first);
  }
  SphereMinResult res = bnb.run(seeds);
  cert.boxes_used = res.boxes;
  if (res.witness_found) {
    cert.verdict = Verdict::not_elliptic;
    cert.candidate_sigma = res.best_value;
  } else if (res.complete && res.certified_lower >= budget.tol) {
    cert.verdict = Verdict::elliptic;
    cert.lower_bound = res.certified_lower;
  } else {
    cert.verdict = Verdict::indeterminate;
    if (!cert.float_candidate) {
      cert.float_candidate = res.best_point;
      cert.candidate_sigma = res.best_value;
    }
  }
  return cert;
}

inline Mat<Poly> symbolic_symbol(const Operator& op) {
  Mat<Poly> s(op.dim_w(), op.dim_v());
  for (int i = 0; i < op.dim_w(); ++i)
    for (int j = 0; j < op.dim_v(); ++j) {
      Poly p;
      for (int k = 0; k < op.n(); ++k) {
        if (op.coeff(k)(i, j) != 0)
          p += Poly::variable(op.n(), k, op.coeff(k)(i, j));
      }
      s(i, j) = std::move(p);
    }
  return s;
}

namespace detail {

template <class F>
void for_each_combination(int n, int k, F&& f) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    f(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

inline RankCertificate check_constant_rank(const Operator& op,
                                           const CertifyBudget& budget = {}) {
  RankCertificate cert;
  cert.budget = budget.max_boxes;

  // Generic rank: max over several pseudorandom rational probes.
  int r = 0;
  Vec<Rat> witness_point;
  for (int k = 0; k < 5; ++k) {
    Vec<Rat> p = detail::generic_rational_point(op.n(), k);
    int rk = rank(eval_symbol(op, p));
    if (rk > r) {
      r = rk;
      witness_point = p;
    }
  }
  cert.r = r;
  cert.generic_point = witness_point.empty()
                           ? detail::generic_rational_point(op.n(), 0)
                           : witness_point;

  // Upper part: every (r+1)-minor of the symbol vanishes identically.
  int minor_size = r + 1;
  if (minor_size > std::min(op.dim_w(), op.dim_v())) {
    cert.minors_vacuous = true;
    cert.minors_vanish = true;
  } else {
    Mat<Poly> sym = symbolic_symbol(op);
    bool all_zero = true;
    Poly offending;
    detail::for_each_combination(op.dim_w(), minor_size, [&](const std::vector<int>& rows) {
      if (!all_zero) return;
      detail::for_each_combination(op.dim_v(), minor_size, [&](const std::vector<int>& cols) {
        if (!all_zero) return;
        Mat<Poly> sub(minor_size, minor_size);
        for (int i = 0; i < minor_size; ++i)
          for (int j = 0; j < minor_size; ++j) sub(i, j) = sym(rows[i], cols[j]);
        ++cert.minor_count;
        Poly d = det_laplace(sub);
        if (!d.is_zero()) {
          all_zero = false;
          offending = d;
        }
      });
    });
    cert.minors_vanish = all_zero;
    if (!all_zero) {
      // a nonzero minor means the rank exceeds r at some exact point
      for (int k = 0; k < 64; ++k) {
        Vec<Rat> p = detail::generic_rational_point(op.n(), k + 7);
        if (offending.eval(p) != 0) {
          cert.drop_point = p;
          cert.drop_rank = rank(eval_symbol(op, p));
          break;
        }
      }
      cert.verdict = RankVerdict::not_constant_rank;
      return cert;
    }
  }

  // Lower part: sigma_r bounded away from zero on the sphere.
  detail::FloatSymbol fs(op);
  cert.lipschitz = fs.lipschitz;
  SphereMinOptions opts;
  opts.tol = budget.tol;
  opts.max_boxes = budget.max_boxes;
  opts.quality_gap = std::max(budget.quality_gap, 1e-4);
  SphereBnB bnb(op.n(),
                [&](const std::vector<double>& x) {
                  return detail::singular_value_from_top(fs.at(x), r);
                },
                fs.lipschitz, opts);
  bnb.set_candidate_hook([&](const std::vector<double>& p, double sigma) {
    if (sigma >= budget.tol / 2) return false;
    auto xi = detail::rationalize_direction(p, op.n(), false);
    if (!xi) return false;
    Vec<Rat> xr(op.n());
    for (int i = 0; i < op.n(); ++i) {
      if ((*xi)[i].im != 0) return false;
      xr[i] = (*xi)[i].re;
    }
    int rk = rank(eval_symbol(op, xr));
    if (rk >= r) return false;
    cert.drop_point = xr;
    cert.drop_rank = rk;
    return true;
  });
  SphereMinResult res = bnb.run();
  cert.boxes_used = res.boxes;
  if (res.witness_found) {
    cert.verdict = RankVerdict::not_constant_rank;
  } else if (res.complete && res.certified_lower >= budget.tol) {
    cert.verdict = RankVerdict::constant_rank;
    cert.sigma_r_lower = res.certified_lower;
  } else {
    cert.verdict = RankVerdict::indeterminate;
  }
  return cert;
}

/// Exact V-valued polynomial kernel {p : A p = 0, deg p <= d} per degree.
inline PolyKernel kernel_polynomials(const Operator& op, int d_max) {
  if (d_max < 0) throw ValidationError("kernel_polynomials: d_max must be >= 0");
  PolyKernel out;
  out.d_max = d_max;

  auto kernel_at_degree = [&](int d, bool want_basis) {
    auto cols_mono = monomials_up_to_degree(op.n(), d);
    auto rows_mono = d > 0 ? monomials_up_to_degree(op.n(), d - 1)
                           : std::vector<std::vector<int>>{};
    std::map<std::vector<int>, int> row_index;
    for (size_t i = 0; i < rows_mono.size(); ++i) row_index[rows_mono[i]] = int(i);

    int ncols = static_cast<int>(cols_mono.size()) * op.dim_v();
    int nrows = static_cast<int>(rows_mono.size()) * op.dim_w();
    Mat<Rat> sys(std::max(nrows, 1), ncols);
    for (size_t a = 0; a < cols_mono.size(); ++a) {
      for (int j = 0; j < op.dim_v(); ++j) {
        int col = int(a) * op.dim_v() + j;
        for (int i = 0; i < op.n(); ++i) {
          if (cols_mono[a][i] == 0) continue;
          std::vector<int> beta = cols_mono[a];
          beta[i] -= 1;
          int ri = row_index.at(beta);
          for (int m = 0; m < op.dim_w(); ++m)
            sys(ri * op.dim_w() + m, col) += Rat(cols_mono[a][i]) * op.coeff(i)(m, j);
        }
      }
    }
    auto ns = nullspace(sys);
    if (want_basis) {
      for (const auto& v : ns) {
        std::vector<Poly> p(op.dim_v(), Poly());
        for (size_t a = 0; a < cols_mono.size(); ++a)
          for (int j = 0; j < op.dim_v(); ++j) {
            const Rat& c = v[a * op.dim_v() + j];
            if (c != 0) p[j].add_term(cols_mono[a], c);
          }
        out.basis.push_back(std::move(p));
      }
    }
    return static_cast<int>(ns.size());
  };

  for (int d = 0; d <= d_max; ++d)
    out.dims.push_back(kernel_at_degree(d, d == d_max));
  for (int l = 0; l + 1 <= d_max; ++l) {
    if (out.dims[l] == out.dims[l + 1]) {
      out.stabilization_degree = l;
      break;
    }
  }
  return out;
}

/// A p as a W-valued polynomial; zero iff p is in the operator kernel.
inline std::vector<Poly> apply_operator_poly(const Operator& op,
                                             const std::vector<Poly>& p) {
  std::vector<Poly> out(op.dim_w(), Poly());
  for (int i = 0; i < op.n(); ++i)
    for (int j = 0; j < op.dim_v(); ++j) {
      Poly dp = p[j].derivative(i);
      if (dp.is_zero()) continue;
      for (int m = 0; m < op.dim_w(); ++m) {
        if (op.coeff(i)(m, j) != 0)
          out[m] += Poly::constant(op.n(), op.coeff(i)(m, j)) * dp;
      }
    }
  return out;
}

}  // namespace opcert
