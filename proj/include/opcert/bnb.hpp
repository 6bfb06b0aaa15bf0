#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace opcert {

/// Certified global minimization of a Lipschitz function over the unit
/// sphere S^{d-1}. Boxes are axis-aligned patches of the faces of the
/// enclosing cube [-1,1]^d, projected radially; radial projection is a
/// contraction outside the unit ball, so the chordal radius of a patch is
/// bounded by the half-diagonal of its box. On each box the objective is
/// bounded below by f(center/|center|) - L * radius.
///
/// The objective must be antipodally symmetric (f(-x) = f(x)); only the
/// faces with coordinate +1 are covered.
struct SphereMinOptions {
  double tol = 1e-8;            // verdict threshold for the first pass
  long long max_boxes = 10000000;
  double quality_gap = 1e-6;    // absolute gap target for bound refinement
  double hook_threshold = 0.02; // call the candidate hook below this value
  double min_radius = 1e-9;     // give up refining a pass below this radius
  int max_hook_failures = 16;
};

struct SphereMinResult {
  bool complete = false;          // at least the tol-pass covered the sphere
  double certified_lower = 0.0;   // valid global lower bound iff complete
  double achieved_gap = std::numeric_limits<double>::infinity();
  std::vector<double> best_point; // on the sphere
  double best_value = std::numeric_limits<double>::infinity();
  long long boxes = 0;
  bool witness_found = false;     // a candidate hook reported resolution
};

class SphereBnB {
 public:
  using Objective = std::function<double(const std::vector<double>&)>;
  // Called on low points; returns true when the caller has confirmed a
  // witness and the search should stop.
  using CandidateHook = std::function<bool(const std::vector<double>&, double)>;

  SphereBnB(int dim, Objective f, double lipschitz,
            SphereMinOptions opts = {})
      : d_(dim), f_(std::move(f)), lip_(lipschitz), opts_(opts) {}

  void set_candidate_hook(CandidateHook h) { hook_ = std::move(h); }

  SphereMinResult run(const std::vector<std::vector<double>>& initial_points = {}) {
    res_ = SphereMinResult{};
    hook_failures_ = 0;
    if (d_ == 1) {
      std::vector<double> p{1.0};
      double v = f_(p);
      res_.best_point = p;
      res_.best_value = v;
      res_.boxes = 1;
      if (maybe_hook(p, v)) return res_;
      res_.complete = true;
      res_.certified_lower = v;
      res_.achieved_gap = 0.0;
      return res_;
    }

    for (const auto& p : initial_points) consider(p);
    sample_initial();
    if (res_.witness_found) return res_;

    // Ladder of DFS passes with increasingly tight targets. Each completed
    // pass certifies min >= (its leaf minimum). A failed pass (budget or
    // resolution floor) leaves the previous pass's bound in place.
    const double gaps[] = {0.9, 0.5, 0.2, 0.05, 0.01, 1e-3, 1e-4, 1e-5, 1e-6};
    std::vector<double> targets{opts_.tol};
    for (double g : gaps) {
      double tau = res_.best_value * (1.0 - g);
      if (res_.best_value * g <= opts_.quality_gap) break;
      if (tau > targets.back()) targets.push_back(tau);
    }
    double final_tau = res_.best_value - opts_.quality_gap;
    if (final_tau > targets.back()) targets.push_back(final_tau);

    for (double tau : targets) {
      // A pass certifying min >= tau needs leaf radii below
      // (best - tau) / L; skip passes whose leaf count cannot fit in the
      // remaining budget instead of burning it on a doomed descent.
      double margin = res_.best_value - tau;
      if (margin <= 0) break;
      double w = margin / (lip_ * std::sqrt(double(d_ - 1)));
      double per_axis = std::ceil(1.0 / std::min(1.0, w));
      double est = 2.0 * d_ * std::pow(per_axis, d_ - 1);
      if (est > double(opts_.max_boxes - res_.boxes)) break;
      bool ok = dfs_pass(tau);
      if (res_.witness_found) return res_;
      if (!ok) break;
      res_.complete = true;
      res_.certified_lower = pass_min_lb_;
      res_.achieved_gap = res_.best_value - res_.certified_lower;
    }
    return res_;
  }

 private:
  struct Box {
    int face;  // axis with coordinate fixed at +1
    std::vector<double> lo, hi;  // d-1 free coordinates in [-1,1]
  };

  void embed(const Box& b, const std::vector<double>& q,
             std::vector<double>& x) const {
    x.resize(d_);
    int k = 0;
    for (int i = 0; i < d_; ++i) x[i] = (i == b.face) ? 1.0 : q[k++];
  }

  double eval_center(const Box& b, std::vector<double>& point_out,
                     double& radius_out) {
    scratch_q_.resize(d_ - 1);
    double r2 = 0;
    for (int i = 0; i < d_ - 1; ++i) {
      scratch_q_[i] = 0.5 * (b.lo[i] + b.hi[i]);
      double hw = 0.5 * (b.hi[i] - b.lo[i]);
      r2 += hw * hw;
    }
    radius_out = std::sqrt(r2);
    embed(b, scratch_q_, point_out);
    double norm = 0;
    for (double xi : point_out) norm += xi * xi;
    norm = std::sqrt(norm);
    for (double& xi : point_out) xi /= norm;
    return f_(point_out);
  }

  void consider(const std::vector<double>& p) {
    double v = f_(p);
    if (v < res_.best_value) {
      res_.best_value = v;
      res_.best_point = p;
    }
    maybe_hook(p, v);
  }

  bool maybe_hook(const std::vector<double>& p, double v) {
    if (!hook_ || v >= opts_.hook_threshold) return false;
    if (hook_failures_ >= opts_.max_hook_failures) return false;
    if (hook_(p, v)) {
      res_.witness_found = true;
      res_.best_point = p;
      res_.best_value = v;
      return true;
    }
    ++hook_failures_;
    return false;
  }

  void sample_initial() {
    // Face centers and corners, plus a deterministic low-discrepancy sweep.
    std::vector<double> p(d_);
    for (int a = 0; a < d_; ++a) {
      for (int i = 0; i < d_; ++i) p[i] = (i == a) ? 1.0 : 0.0;
      consider(p);
      if (res_.witness_found) return;
    }
    const double inv_sqrt = 1.0 / std::sqrt(double(d_));
    for (int mask = 0; mask < (1 << (d_ - 1)); ++mask) {
      p[d_ - 1] = inv_sqrt;
      for (int i = 0; i < d_ - 1; ++i)
        p[i] = ((mask >> i) & 1) ? inv_sqrt : -inv_sqrt;
      consider(p);
      if (res_.witness_found) return;
      if (mask > 64) break;
    }
    // additive-recurrence points on the cube surface
    double state = 0.5;
    const double golden = 0.6180339887498949;
    for (int s = 0; s < 64 * d_; ++s) {
      double norm = 0;
      for (int i = 0; i < d_; ++i) {
        state += golden * (i + 1);
        state -= std::floor(state);
        p[i] = 2.0 * state - 1.0;
        norm += p[i] * p[i];
      }
      norm = std::sqrt(norm);
      if (norm < 1e-9) continue;
      for (int i = 0; i < d_; ++i) p[i] /= norm;
      consider(p);
      if (res_.witness_found) return;
    }
  }

  // Returns true when the whole sphere was certified >= tau.
  bool dfs_pass(double tau) {
    pass_min_lb_ = std::numeric_limits<double>::infinity();
    pass_failed_ = false;
    for (int a = 0; a < d_ && !pass_failed_ && !res_.witness_found; ++a) {
      Box b{a, std::vector<double>(d_ - 1, -1.0), std::vector<double>(d_ - 1, 1.0)};
      recurse(b, tau);
    }
    return !pass_failed_ && !res_.witness_found;
  }

  void recurse(const Box& b, double tau) {
    if (pass_failed_ || res_.witness_found) return;
    if (++res_.boxes > opts_.max_boxes) {
      pass_failed_ = true;
      return;
    }
    double r;
    double v = eval_center(b, scratch_p_, r);
    const std::vector<double>& p = scratch_p_;
    if (v < res_.best_value) {
      res_.best_value = v;
      res_.best_point = p;
    }
    if (maybe_hook(p, v)) return;
    double lb = v - lip_ * r;
    if (lb >= tau) {
      if (lb < pass_min_lb_) pass_min_lb_ = lb;
      return;
    }
    if (r < opts_.min_radius) {
      // Cannot separate this box from tau at resolution floor.
      pass_failed_ = true;
      return;
    }
    int widest = 0;
    double w = -1;
    for (int i = 0; i < d_ - 1; ++i) {
      double wi = b.hi[i] - b.lo[i];
      if (wi > w) { w = wi; widest = i; }
    }
    double mid = 0.5 * (b.lo[widest] + b.hi[widest]);
    Box left = b, right = b;
    left.hi[widest] = mid;
    right.lo[widest] = mid;
    recurse(left, tau);
    recurse(right, tau);
  }

  int d_;
  Objective f_;
  double lip_;
  SphereMinOptions opts_;
  CandidateHook hook_;
  SphereMinResult res_;
  double pass_min_lb_ = 0;
  bool pass_failed_ = false;
  int hook_failures_ = 0;
  std::vector<double> scratch_q_, scratch_p_;
};

}  // namespace opcert
