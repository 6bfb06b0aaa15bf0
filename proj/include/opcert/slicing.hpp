#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "opcert/grid.hpp"
#include "opcert/poly.hpp"
#include "opcert/spectrum.hpp"

namespace opcert {

enum class FdMode { interior, extension };

/// Forward differences contracted with the coefficient matrices:
/// mass(x) = h^n * sum_i A_i (u(x + h e_i) - u(x)) / h on masked cells.
/// In interior mode an axis whose forward neighbor leaves the mask is
/// skipped; in extension mode the neighbor value is taken as zero.
inline DiscreteMeasure apply_operator_fd(const GridField& field, const Operator& op,
                                         FdMode mode = FdMode::interior) {
  if (field.dim_v != op.dim_v())
    throw DimensionError("apply_operator_fd: dimV mismatch");
  const GridDomain& dom = *field.domain;
  std::vector<std::vector<double>> a(op.n());
  for (int i = 0; i < op.n(); ++i) {
    a[i].resize(size_t(op.dim_w()) * op.dim_v());
    for (int r = 0; r < op.dim_w(); ++r)
      for (int c = 0; c < op.dim_v(); ++c)
        a[i][size_t(r) * op.dim_v() + c] = to_double(op.coeff(i)(r, c));
  }
  DiscreteMeasure out(field.domain, op.dim_w());
  out.provenance = "apply_operator_fd(" +
                   std::string(mode == FdMode::interior ? "interior" : "extension") +
                   ")";
  double scale = dom.cell_volume() / dom.h;
  std::vector<int> idx(dom.n, 0);
  for (long c = 0; c < dom.cell_count(); ++c) {
    if (dom.mask[c]) {
      for (int i = 0; i < std::min(dom.n, op.n()); ++i) {
        std::vector<int> nb = idx;
        nb[i] += 1;
        bool inside = dom.masked(nb);
        if (!inside && mode == FdMode::interior) continue;
        long cn = inside ? dom.flat_index(nb) : -1;
        for (int j = 0; j < op.dim_v(); ++j) {
          double d = (inside ? field.at(cn, j) : 0.0) - field.at(c, j);
          if (d == 0.0) continue;
          for (int r = 0; r < op.dim_w(); ++r)
            out.at(c, r) += a[i][size_t(r) * op.dim_v() + j] * d * scale;
        }
      }
    }
    GridDomain::inc(idx, dom.shape);
  }
  return out;
}

struct SliceTV {
  std::vector<double> line_tvs;
  double lhs = 0.0;
};

/// 1D total variations of <v*, u> along lines in direction xi, traced over
/// a lattice of offsets with spacing h on xi-perp. The lattice is anchored
/// at the first cell center so axis-aligned directions sample cell centers
/// exactly; values come from nearest-cell lookup, variation is restricted
/// to in-domain runs.
inline SliceTV slice_tv(const GridField& field, const std::vector<double>& xi,
                        const std::vector<double>& v_star) {
  const GridDomain& dom = *field.domain;
  int n = dom.n;
  if (static_cast<int>(xi.size()) != n)
    throw DimensionError("slice_tv: xi dimension mismatch");
  double nrm = 0;
  for (double x : xi) nrm += x * x;
  if (std::abs(std::sqrt(nrm) - 1.0) > 1e-12)
    throw ValidationError("slice_tv: xi must be a unit vector");

  // orthonormal basis of xi-perp, Gram-Schmidt over coordinate axes
  std::vector<std::vector<double>> basis;
  for (int axis = 0; axis < n && static_cast<int>(basis.size()) < n - 1; ++axis) {
    std::vector<double> b(n, 0.0);
    b[axis] = 1.0;
    double d = 0;
    for (int i = 0; i < n; ++i) d += b[i] * xi[i];
    for (int i = 0; i < n; ++i) b[i] -= d * xi[i];
    for (const auto& prev : basis) {
      double p = 0;
      for (int i = 0; i < n; ++i) p += b[i] * prev[i];
      for (int i = 0; i < n; ++i) b[i] -= p * prev[i];
    }
    double bn = 0;
    for (double x : b) bn += x * x;
    bn = std::sqrt(bn);
    if (bn < 1e-8) continue;
    for (double& x : b) x /= bn;
    basis.push_back(std::move(b));
  }

  // anchored at the central cell center: axis-aligned directions then
  // sample cell centers exactly, and the reach covers the half-diagonal
  std::vector<double> anchor(n);
  double radius2 = 0;
  for (int i = 0; i < n; ++i) {
    anchor[i] = dom.lo[i] + (dom.shape[i] / 2 + 0.5) * dom.h;
    double half = 0.5 * (dom.hi[i] - dom.lo[i]);
    radius2 += half * half;
  }
  int reach = static_cast<int>(std::ceil(std::sqrt(radius2) / dom.h)) + 1;

  SliceTV out;
  KahanSum lhs;
  std::vector<int> koff(n - 1, -reach);
  std::vector<int> cell(n);
  std::vector<double> p(n);
  bool more = true;
  while (more) {
    KahanSum tv;
    bool have_prev = false;
    double prev = 0.0;
    for (int t = -reach; t <= reach; ++t) {
      for (int i = 0; i < n; ++i) {
        p[i] = anchor[i] + dom.h * t * xi[i];
        for (int j = 0; j < n - 1; ++j) p[i] += dom.h * koff[j] * basis[j][i];
      }
      bool ok = dom.cell_at(p, cell);
      long c = ok ? dom.flat_index(cell) : -1;
      if (ok && dom.mask[c]) {
        double s = 0;
        for (int j = 0; j < field.dim_v; ++j) s += v_star[j] * field.at(c, j);
        if (have_prev) tv.add(std::abs(s - prev));
        prev = s;
        have_prev = true;
      } else {
        have_prev = false;
      }
    }
    if (tv.value() != 0.0) out.line_tvs.push_back(tv.value());
    lhs.add(tv.value());

    // advance offset lattice
    int j = n - 2;
    for (; j >= 0; --j) {
      if (++koff[j] <= reach) break;
      koff[j] = -reach;
    }
    if (j < 0) more = false;
  }
  out.lhs = lhs.value() * std::pow(dom.h, n - 1);
  return out;
}

struct SliceReport {
  Vec<Rat> xi, v_star, w_star;
  double lhs = 0.0, rhs = 0.0, slack = 0.0;
  double c_slack = 10.0;
  double tv = 0.0, xi_norm = 1.0;
  bool pass = false;
};

/// Discrete check of the slicing inequality lhs <= |Au|(Omega) |w*|.
/// The triple may carry a non-unit xi; the inequality is applied to the
/// rescaled triple (w*/|xi|, xi/|xi|, v*) and the scale is recorded.
inline SliceReport verify_slicing(const GridField& field, const Operator& op,
                                  const RankOneTriple& triple,
                                  double c_slack = 10.0) {
  if (!verify_rank_one_triple(op, triple))
    throw ValidationError("verify_slicing: triple fails exact verification");
  SliceReport rep;
  rep.xi = triple.xi;
  rep.v_star = triple.v_star;
  rep.w_star = triple.w_star;
  rep.c_slack = c_slack;

  int n = op.n();
  std::vector<double> xid(n);
  double nrm = 0;
  for (int i = 0; i < n; ++i) {
    xid[i] = to_double(triple.xi[i]);
    nrm += xid[i] * xid[i];
  }
  nrm = std::sqrt(nrm);
  rep.xi_norm = nrm;
  for (double& x : xid) x /= nrm;
  std::vector<double> vsd(op.dim_v());
  for (int j = 0; j < op.dim_v(); ++j) vsd[j] = to_double(triple.v_star[j]);

  rep.lhs = slice_tv(field, xid, vsd).lhs;
  DiscreteMeasure mu = apply_operator_fd(field, op);
  rep.tv = mu.total_variation(op.gram());
  double w_norm = std::sqrt(to_double(op.dual_norm_sq(triple.w_star)));
  rep.rhs = rep.tv * w_norm / nrm;

  double l1 = 0;
  {
    KahanSum s;
    for (long c = 0; c < field.domain->cell_count(); ++c) {
      if (!field.domain->mask[c]) continue;
      double v = 0;
      for (int j = 0; j < field.dim_v; ++j) v += vsd[j] * field.at(c, j);
      s.add(std::abs(v));
    }
    l1 = s.value() * field.domain->cell_volume();
  }
  rep.slack = c_slack * field.domain->h * (rep.tv + l1);
  rep.pass = rep.lhs <= rep.rhs + rep.slack;
  return rep;
}

struct TranslationReport {
  double defect = 0.0;
  double step = 0.0;
  std::vector<int> shift_cells;
  std::vector<double> snapped_xi;
  bool snapped = false;
};

/// L1 defect of the translated field against itself:
/// sum |<v*, u(x + step*xi) - u(x)>| h^n over cells whose endpoints both lie
/// in the domain, so constants have zero defect and an interior jump line of
/// length L contributes step * L * |jump| exactly on the lattice. The shift
/// is snapped to whole cells; refuse non-lattice directions when snapping
/// is disabled.
inline TranslationReport translation_defect(const GridField& field, double step,
                                            const std::vector<double>& xi,
                                            const std::vector<double>& v_star,
                                            bool allow_snap = true) {
  const GridDomain& dom = *field.domain;
  if (static_cast<int>(xi.size()) != dom.n)
    throw DimensionError("translation_defect: xi dimension mismatch");
  if (step <= 0) throw ValidationError("translation_defect: step must be positive");
  TranslationReport rep;
  rep.step = step;
  rep.shift_cells.resize(dom.n);
  bool exact = true, nonzero = false;
  for (int i = 0; i < dom.n; ++i) {
    double cells = step * xi[i] / dom.h;
    rep.shift_cells[i] = static_cast<int>(std::lround(cells));
    if (std::abs(cells - rep.shift_cells[i]) > 1e-9) exact = false;
    if (rep.shift_cells[i] != 0) nonzero = true;
  }
  if (!nonzero)
    throw ValidationError("translation_defect: step*xi shorter than one cell");
  if (!exact) {
    if (!allow_snap)
      throw ValidationError("translation_defect: xi is not lattice-compatible");
    rep.snapped = true;
  }
  rep.snapped_xi.resize(dom.n);
  for (int i = 0; i < dom.n; ++i)
    rep.snapped_xi[i] = rep.shift_cells[i] * dom.h / step;

  auto scalar = [&](long c) {
    double s = 0;
    for (int j = 0; j < field.dim_v; ++j) s += v_star[j] * field.at(c, j);
    return s;
  };
  KahanSum sum;
  std::vector<int> idx(dom.n, 0), shifted(dom.n);
  for (long c = 0; c < dom.cell_count(); ++c) {
    if (dom.mask[c]) {
      for (int i = 0; i < dom.n; ++i) shifted[i] = idx[i] + rep.shift_cells[i];
      if (dom.masked(shifted))
        sum.add(std::abs(scalar(dom.flat_index(shifted)) - scalar(c)));
    }
    GridDomain::inc(idx, dom.shape);
  }
  rep.defect = sum.value() * dom.cell_volume();
  return rep;
}

namespace detail {

/// Cubic B-spline on [-2, 2].
inline double bspline3(double t) {
  t = std::abs(t);
  if (t >= 2.0) return 0.0;
  if (t >= 1.0) {
    double s = 2.0 - t;
    return s * s * s / 6.0;
  }
  return (4.0 - 6.0 * t * t + 3.0 * t * t * t) / 6.0;
}

}  // namespace detail

/// Separable discrete mollification with a tensor-product cubic B-spline of
/// support radius eps. Weights are renormalized over the in-mask stencil in
/// each 1D pass, so constants are preserved exactly on any masked domain.
inline GridField mollify(const GridField& field, double eps) {
  const GridDomain& dom = *field.domain;
  if (eps < 2.0 * dom.h)
    throw ValidationError("mollify: eps must be at least 2h");
  int reach = static_cast<int>(std::ceil(eps / dom.h)) - 1;
  std::vector<double> w(2 * reach + 1);
  double total = 0;
  for (int j = -reach; j <= reach; ++j) {
    w[j + reach] = detail::bspline3(2.0 * j * dom.h / eps);
    total += w[j + reach];
  }
  for (double& x : w) x /= total;

  GridField cur = field;
  for (int axis = 0; axis < dom.n; ++axis) {
    GridField next(field.domain, field.dim_v);
    std::vector<int> idx(dom.n, 0);
    for (long c = 0; c < dom.cell_count(); ++c) {
      if (dom.mask[c]) {
        double wsum = 0;
        std::vector<double> acc(field.dim_v, 0.0);
        std::vector<int> nb = idx;
        for (int j = -reach; j <= reach; ++j) {
          nb[axis] = idx[axis] + j;
          if (!dom.masked(nb)) continue;
          long cn = dom.flat_index(nb);
          double wj = w[j + reach];
          wsum += wj;
          for (int k = 0; k < field.dim_v; ++k) acc[k] += wj * cur.at(cn, k);
        }
        for (int k = 0; k < field.dim_v; ++k)
          next.at(c, k) = wsum > 0 ? acc[k] / wsum : 0.0;
      }
      GridDomain::inc(idx, dom.shape);
    }
    cur = std::move(next);
  }
  return cur;
}

struct MomentSeminorm {
  double value = 0.0;
  int basis_used = 0;
  bool empty_basis = false;
};

namespace detail {

inline double eval_poly_double(const Poly& p, const std::vector<double>& x) {
  double acc = 0;
  for (const auto& [m, c] : p.terms()) {
    double t = to_double(c);
    for (size_t i = 0; i < m.size(); ++i)
      for (int k = 0; k < m[i]; ++k) t *= x[i];
    acc += t;
  }
  return acc;
}

/// Smoothed indicator of {dist(x, omega) <= 1/k} equal to 1 on the box omega.
inline double bump_psi(const std::vector<double>& x, const std::vector<double>& olo,
                       const std::vector<double>& ohi, int k) {
  double d2 = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double e = std::max({olo[i] - x[i], x[i] - ohi[i], 0.0});
    d2 += e * e;
  }
  double u = 1.0 - k * std::sqrt(d2);
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

}  // namespace detail

/// The moment seminorm rho(w) = sum_{i,k<=K} 2^{-k} c_{i,k}^{-1}
/// |int psi^k b_i . w dx| with b_i the L2(omega)-orthonormalized kernel
/// basis, omega the concentric half-size sub-box, and the normalization
/// c_{i,k} = max(1, <w, psi^k b_i>).
inline MomentSeminorm moment_seminorm(const GridField& w,
                                      const std::vector<std::vector<Poly>>& kernel_basis,
                                      int bump_count = 6) {
  MomentSeminorm out;
  if (kernel_basis.empty()) {
    out.empty_basis = true;
    return out;
  }
  const GridDomain& dom = *w.domain;
  int k_max = std::min(bump_count, 8);
  if (k_max < 1) throw ValidationError("moment_seminorm: bump_count must be >= 1");

  std::vector<double> olo(dom.n), ohi(dom.n);
  for (int i = 0; i < dom.n; ++i) {
    double len = dom.hi[i] - dom.lo[i];
    olo[i] = dom.lo[i] + 0.25 * len;
    ohi[i] = dom.hi[i] - 0.25 * len;
  }
  // cells of omega (masked) in fixed order
  std::vector<long> omega_cells;
  std::vector<int> idx(dom.n, 0);
  std::vector<std::vector<double>> centers;
  for (long c = 0; c < dom.cell_count(); ++c) {
    if (dom.mask[c]) {
      auto x = dom.cell_center(idx);
      bool in = true;
      for (int i = 0; i < dom.n; ++i)
        if (x[i] < olo[i] || x[i] > ohi[i]) in = false;
      if (in) omega_cells.push_back(c);
    }
    GridDomain::inc(idx, dom.shape);
  }
  // sample the kernel basis and orthonormalize in L2(omega)
  std::vector<std::vector<double>> cell_center_cache(dom.cell_count());
  {
    std::vector<int> it(dom.n, 0);
    for (long c = 0; c < dom.cell_count(); ++c) {
      cell_center_cache[c] = dom.cell_center(it);
      GridDomain::inc(it, dom.shape);
    }
  }
  double vol = dom.cell_volume();
  auto ip_omega = [&](const GridField& a, const GridField& b) {
    KahanSum s;
    for (long c : omega_cells)
      for (int j = 0; j < a.dim_v; ++j) s.add(a.at(c, j) * b.at(c, j));
    return s.value() * vol;
  };
  std::vector<GridField> basis;
  for (const auto& poly_vec : kernel_basis) {
    GridField b(w.domain, w.dim_v);
    for (long c = 0; c < dom.cell_count(); ++c) {
      if (!dom.mask[c]) continue;
      for (int j = 0; j < w.dim_v; ++j)
        b.at(c, j) = detail::eval_poly_double(poly_vec[j], cell_center_cache[c]);
    }
    for (const auto& prev : basis) {
      double p = ip_omega(b, prev);
      for (size_t t = 0; t < b.values.size(); ++t) b.values[t] -= p * prev.values[t];
    }
    double nrm = std::sqrt(std::max(0.0, ip_omega(b, b)));
    if (nrm < 1e-10) continue;
    for (double& v : b.values) v /= nrm;
    basis.push_back(std::move(b));
  }
  out.basis_used = static_cast<int>(basis.size());
  if (basis.empty()) {
    out.empty_basis = true;
    return out;
  }

  KahanSum rho;
  for (const auto& b : basis) {
    for (int k = 1; k <= k_max; ++k) {
      KahanSum term;
      for (long c = 0; c < dom.cell_count(); ++c) {
        if (!dom.mask[c]) continue;
        double psi = detail::bump_psi(cell_center_cache[c], olo, ohi, k);
        if (psi == 0.0) continue;
        double s = 0;
        for (int j = 0; j < w.dim_v; ++j) s += b.at(c, j) * w.at(c, j);
        term.add(psi * s);
      }
      double t = term.value() * vol;
      double c_ik = std::max(1.0, t);
      rho.add(std::abs(t) / (std::pow(2.0, k) * c_ik));
    }
  }
  out.value = rho.value();
  return out;
}

struct PoincareProbe {
  double c_l1 = 0.0;       // max ||v||_L1 / (rho(v) + |Av|)
  double c_sobolev = 0.0;  // same with the L^{n/(n-1)} norm on the inner box
  int skipped = 0;
};

inline PoincareProbe poincare_probe(const std::vector<GridField>& fields,
                                    const Operator& op,
                                    const std::vector<std::vector<Poly>>& kernel_basis,
                                    int bump_count = 6) {
  if (fields.empty()) throw ValidationError("poincare_probe: empty field list");
  PoincareProbe probe;
  const GridDomain& dom = *fields.front().domain;
  double pstar = double(dom.n) / (dom.n - 1);
  std::vector<double> ilo(dom.n), ihi(dom.n);
  for (int i = 0; i < dom.n; ++i) {
    double len = dom.hi[i] - dom.lo[i];
    ilo[i] = dom.lo[i] + 0.25 * len;
    ihi[i] = dom.hi[i] - 0.25 * len;
  }
  for (const auto& f : fields) {
    double rho = moment_seminorm(f, kernel_basis, bump_count).value;
    double tv = apply_operator_fd(f, op).total_variation(op.gram());
    double denom = rho + tv;
    if (denom < 1e-14) {
      ++probe.skipped;
      continue;
    }
    probe.c_l1 = std::max(probe.c_l1, f.l1_norm() / denom);
    KahanSum lp;
    std::vector<int> idx(dom.n, 0);
    for (long c = 0; c < dom.cell_count(); ++c) {
      if (dom.mask[c]) {
        auto x = dom.cell_center(idx);
        bool in = true;
        for (int i = 0; i < dom.n; ++i)
          if (x[i] < ilo[i] || x[i] > ihi[i]) in = false;
        if (in) {
          double q = 0;
          for (int j = 0; j < f.dim_v; ++j) q += f.at(c, j) * f.at(c, j);
          lp.add(std::pow(std::sqrt(q), pstar));
        }
      }
      GridDomain::inc(idx, dom.shape);
    }
    double lpnorm = std::pow(lp.value() * dom.cell_volume(), 1.0 / pstar);
    probe.c_sobolev = std::max(probe.c_sobolev, lpnorm / denom);
  }
  return probe;
}

struct StripReport {
  double alpha0 = 0.0, alpha = 0.0;
  double rho1 = 0.0;
  double lhs = 0.0;
  double surface_term = 0.0;    // (a0-a)/rho1 * surface integral on Sigma_{a0}
  double variation_term = 0.0;  // (a0-a) * d_n-variation over the strip
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
};

/// Discrete co-area strip estimate on a graph domain: the L1 mass of
/// <v*, u> between the graphs shifted by alpha0 and alpha is bounded by the
/// shifted-graph surface integral (with the 1/rho1 normal factor) plus the
/// vertical variation through the strip.
inline StripReport boundary_strip_estimate(const GridField& field, const Operator& op,
                                           const RankOneTriple& triple,
                                           double alpha0, double alpha,
                                           double c_slack = 10.0) {
  const GridDomain& dom = *field.domain;
  if (dom.kind != DomainKind::graph)
    throw ValidationError("boundary_strip_estimate: graph domain required");
  if (!(0 < alpha && alpha < alpha0))
    throw ValidationError("boundary_strip_estimate: need 0 < alpha < alpha0");
  if (!verify_rank_one_triple(op, triple))
    throw ValidationError("boundary_strip_estimate: triple fails verification");
  for (double a : dom.graph_samples)
    if (a - alpha0 <= dom.lo[dom.n - 1])
      throw ValidationError("boundary_strip_estimate: strip leaves the domain");

  StripReport rep;
  rep.alpha0 = alpha0;
  rep.alpha = alpha;
  rep.rho1 = 1.0 / std::sqrt(1.0 + dom.lipschitz * dom.lipschitz);

  std::vector<double> vsd(op.dim_v());
  for (int j = 0; j < op.dim_v(); ++j) vsd[j] = to_double(triple.v_star[j]);
  auto scalar_at = [&](long c) {
    double s = 0;
    for (int j = 0; j < field.dim_v; ++j) s += vsd[j] * field.at(c, j);
    return s;
  };

  int n = dom.n;
  std::vector<int> base_shape(dom.shape.begin(), dom.shape.end() - 1);
  long base_cells = 1;
  for (int s : base_shape) base_cells *= s;
  double area_cell = std::pow(dom.h, n - 1);

  KahanSum lhs, surface, variation;
  std::vector<int> bidx(n - 1, 0);
  for (long bc = 0; bc < base_cells; ++bc) {
    double a = dom.graph_samples[bc];
    // local slope for the surface area element
    double g2 = 0;
    for (int i = 0; i < n - 1; ++i) {
      std::vector<int> nb = bidx;
      double d = 0;
      if (bidx[i] + 1 < base_shape[i]) {
        nb[i] += 1;
        long fnb = 0;
        for (int t = 0; t < n - 1; ++t) fnb = fnb * base_shape[t] + nb[t];
        d = (dom.graph_samples[fnb] - a) / dom.h;
      }
      g2 += d * d;
    }
    double area = area_cell * std::sqrt(1.0 + g2);

    std::vector<int> idx(n);
    for (int i = 0; i < n - 1; ++i) idx[i] = bidx[i];
    KahanSum col_lhs, col_var;
    bool have_prev = false;
    double prev = 0;
    long surf_cell = -1;
    double surf_dist = 1e300;
    for (int zn = 0; zn < dom.shape[n - 1]; ++zn) {
      idx[n - 1] = zn;
      double xn = dom.lo[n - 1] + (zn + 0.5) * dom.h;
      if (!dom.masked(idx)) { have_prev = false; continue; }
      long c = dom.flat_index(idx);
      // strip mass by exact vertical overlap of the cell with the interval,
      // so constants integrate to (alpha0 - alpha) |O| without h-quantization
      double cell_lo = dom.lo[n - 1] + zn * dom.h;
      double overlap = std::min(cell_lo + dom.h, a - alpha) -
                       std::max(cell_lo, a - alpha0);
      if (overlap > 0) col_lhs.add(std::abs(scalar_at(c)) * overlap / dom.h);
      // vertical variation across the closed strip (a - alpha0, a - alpha)
      if (xn > a - alpha0 && xn < a - alpha + dom.h) {
        double s = scalar_at(c);
        if (have_prev) col_var.add(std::abs(s - prev));
        prev = s;
        have_prev = true;
      } else {
        have_prev = false;
      }
      double d = std::abs(xn - (a - alpha0));
      if (d < surf_dist) { surf_dist = d; surf_cell = c; }
    }
    lhs.add(col_lhs.value() * dom.cell_volume());
    variation.add(col_var.value() * area_cell);
    if (surf_cell >= 0) surface.add(std::abs(scalar_at(surf_cell)) * area);
    GridDomain::inc(bidx, base_shape);
  }

  rep.lhs = lhs.value();
  rep.surface_term = (alpha0 - alpha) / rep.rho1 * surface.value();
  rep.variation_term = (alpha0 - alpha) * variation.value();
  rep.rhs = rep.surface_term + rep.variation_term;
  rep.slack = c_slack * dom.h * (rep.lhs + rep.rhs + field.l1_norm());
  rep.pass = rep.lhs <= rep.rhs + rep.slack;
  return rep;
}

}  // namespace opcert
