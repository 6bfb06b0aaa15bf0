#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "opcert/operator.hpp"

namespace opcert {

/// Deterministic compensated (Kahan) accumulator; summation order is the
/// caller's iteration order, which we keep fixed everywhere.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

enum class DomainKind { box, graph };

/// Masked regular grid on a bounding box; cells are indexed per axis and
/// values live at cell centers. Graph domains keep the sampled Lipschitz
/// height function a(x') on the base grid (all axes but the last).
class GridDomain {
 public:
  int n = 0;
  double h = 0.0;
  std::vector<double> lo, hi;
  std::vector<int> shape;        // cells per axis
  std::vector<std::uint8_t> mask;
  DomainKind kind = DomainKind::box;
  std::vector<double> graph_samples;  // a(x') per base cell, graph domains only
  double lipschitz = 0.0;

  static GridDomain box(int n, double h, std::vector<double> lo,
                        std::vector<double> hi) {
    GridDomain d = shell(n, h, std::move(lo), std::move(hi));
    d.kind = DomainKind::box;
    d.mask.assign(d.cell_count(), 1);
    return d;
  }

  /// Graph domain {x_n < a(x')} inside the box; a sampled at base-grid
  /// cell centers. Lipschitz constant = max finite-difference slope.
  static GridDomain graph(int n, double h, std::vector<double> lo,
                          std::vector<double> hi,
                          const std::function<double(const std::vector<double>&)>& a) {
    GridDomain d = shell(n, h, std::move(lo), std::move(hi));
    d.kind = DomainKind::graph;
    std::vector<int> base_shape(d.shape.begin(), d.shape.end() - 1);
    long base_cells = 1;
    for (int s : base_shape) base_cells *= s;
    d.graph_samples.resize(base_cells);
    std::vector<int> idx(n - 1, 0);
    for (long c = 0; c < base_cells; ++c) {
      std::vector<double> x(n - 1);
      for (int i = 0; i < n - 1; ++i) x[i] = d.lo[i] + (idx[i] + 0.5) * d.h;
      d.graph_samples[c] = a(x);
      if (d.graph_samples[c] <= 0)
        throw ValidationError("GridDomain::graph: a must be strictly positive");
      inc(idx, base_shape);
    }
    // max finite-difference slope across base-grid neighbors
    idx.assign(n - 1, 0);
    for (long c = 0; c < base_cells; ++c) {
      for (int i = 0; i < n - 1; ++i) {
        if (idx[i] + 1 >= base_shape[i]) continue;
        std::vector<int> nb = idx;
        nb[i] += 1;
        double slope = std::abs(d.graph_samples[flat(nb, base_shape)] -
                                d.graph_samples[c]) / d.h;
        if (slope > d.lipschitz) d.lipschitz = slope;
      }
      inc(idx, base_shape);
    }
    d.mask.assign(d.cell_count(), 0);
    std::vector<int> full(n, 0);
    for (long c = 0; c < d.cell_count(); ++c) {
      std::vector<int> base(full.begin(), full.end() - 1);
      double xn = d.lo[n - 1] + (full[n - 1] + 0.5) * d.h;
      if (xn < d.graph_samples[flat(base, base_shape)]) d.mask[c] = 1;
      inc(full, d.shape);
    }
    return d;
  }

  long cell_count() const {
    long c = 1;
    for (int s : shape) c *= s;
    return c;
  }

  long flat_index(const std::vector<int>& idx) const { return flat(idx, shape); }

  bool valid_index(const std::vector<int>& idx) const {
    for (int i = 0; i < n; ++i)
      if (idx[i] < 0 || idx[i] >= shape[i]) return false;
    return true;
  }

  bool masked(const std::vector<int>& idx) const {
    return valid_index(idx) && mask[flat_index(idx)];
  }

  std::vector<double> cell_center(const std::vector<int>& idx) const {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = lo[i] + (idx[i] + 0.5) * h;
    return x;
  }

  /// Nearest cell to a point; false when outside the bounding box.
  bool cell_at(const std::vector<double>& x, std::vector<int>& idx) const {
    idx.resize(n);
    for (int i = 0; i < n; ++i) {
      double t = (x[i] - lo[i]) / h - 0.5;
      long k = std::lround(t);
      if (k < 0 || k >= shape[i]) return false;
      idx[i] = static_cast<int>(k);
    }
    return true;
  }

  double cell_volume() const { return std::pow(h, n); }

  /// Height a(x') above a full-grid cell index (graph domains).
  double graph_height(const std::vector<int>& idx) const {
    std::vector<int> base(idx.begin(), idx.end() - 1);
    std::vector<int> base_shape(shape.begin(), shape.end() - 1);
    return graph_samples[flat(base, base_shape)];
  }

  static void inc(std::vector<int>& idx, const std::vector<int>& shape) {
    for (int i = static_cast<int>(idx.size()) - 1; i >= 0; --i) {
      if (++idx[i] < shape[i]) return;
      idx[i] = 0;
    }
  }

 private:
  static GridDomain shell(int n, double h, std::vector<double> lo,
                          std::vector<double> hi) {
    if (n < 2 || n > 3) throw ValidationError("GridDomain: n must be 2 or 3");
    if (h <= 0) throw ValidationError("GridDomain: h must be positive");
    if (static_cast<int>(lo.size()) != n || static_cast<int>(hi.size()) != n)
      throw DimensionError("GridDomain: extent dimension mismatch");
    GridDomain d;
    d.n = n;
    d.h = h;
    d.lo = std::move(lo);
    d.hi = std::move(hi);
    d.shape.resize(n);
    for (int i = 0; i < n; ++i) {
      double len = d.hi[i] - d.lo[i];
      if (len <= 0) throw ValidationError("GridDomain: empty extent");
      d.shape[i] = std::max(1, static_cast<int>(std::lround(len / h)));
    }
    return d;
  }

  static long flat(const std::vector<int>& idx, const std::vector<int>& shape) {
    long f = 0;
    for (size_t i = 0; i < idx.size(); ++i) f = f * shape[i] + idx[i];
    return f;
  }
};

using DomainPtr = std::shared_ptr<const GridDomain>;

/// V-valued samples at cell centers, component-contiguous per cell.
struct GridField {
  DomainPtr domain;
  int dim_v = 0;
  std::vector<double> values;  // cell-major, dim_v components each

  GridField() = default;
  GridField(DomainPtr d, int nv)
      : domain(std::move(d)), dim_v(nv),
        values(static_cast<size_t>(domain->cell_count()) * nv, 0.0) {}

  double& at(long cell, int j) { return values[size_t(cell) * dim_v + j]; }
  double at(long cell, int j) const { return values[size_t(cell) * dim_v + j]; }

  /// Fill from a pointwise function on masked cells.
  void fill(const std::function<std::vector<double>(const std::vector<double>&)>& f) {
    std::vector<int> idx(domain->n, 0);
    for (long c = 0; c < domain->cell_count(); ++c) {
      if (domain->mask[c]) {
        auto v = f(domain->cell_center(idx));
        for (int j = 0; j < dim_v; ++j) at(c, j) = v[j];
      }
      GridDomain::inc(idx, domain->shape);
    }
  }

  /// L1 norm with the Euclidean norm on V, masked cells only.
  double l1_norm() const {
    KahanSum s;
    for (long c = 0; c < domain->cell_count(); ++c) {
      if (!domain->mask[c]) continue;
      double q = 0;
      for (int j = 0; j < dim_v; ++j) q += at(c, j) * at(c, j);
      s.add(std::sqrt(q));
    }
    return s.value() * domain->cell_volume();
  }
};

/// W-valued cell masses (already scaled by h^n).
struct DiscreteMeasure {
  DomainPtr domain;
  int dim_w = 0;
  std::vector<double> masses;  // cell-major, dim_w components each
  std::string provenance;

  DiscreteMeasure() = default;
  DiscreteMeasure(DomainPtr d, int mw)
      : domain(std::move(d)), dim_w(mw),
        masses(static_cast<size_t>(domain->cell_count()) * mw, 0.0) {}

  double& at(long cell, int j) { return masses[size_t(cell) * dim_w + j]; }
  double at(long cell, int j) const { return masses[size_t(cell) * dim_w + j]; }

  /// Total variation with the Gram-corrected norm on W.
  double total_variation(const Mat<Rat>& gram) const {
    std::vector<double> g(size_t(dim_w) * dim_w);
    for (int i = 0; i < dim_w; ++i)
      for (int j = 0; j < dim_w; ++j) g[size_t(i) * dim_w + j] = to_double(gram(i, j));
    KahanSum s;
    for (long c = 0; c < domain->cell_count(); ++c) {
      double q = 0;
      for (int i = 0; i < dim_w; ++i)
        for (int j = 0; j < dim_w; ++j)
          q += at(c, i) * g[size_t(i) * dim_w + j] * at(c, j);
      s.add(std::sqrt(std::max(0.0, q)));
    }
    return s.value();
  }

  double total_variation() const {
    KahanSum s;
    for (long c = 0; c < domain->cell_count(); ++c) {
      double q = 0;
      for (int j = 0; j < dim_w; ++j) q += at(c, j) * at(c, j);
      s.add(std::sqrt(q));
    }
    return s.value();
  }
};

}  // namespace opcert
