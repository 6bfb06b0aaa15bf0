// Acceptance gate: one line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "opcert/json_io.hpp"
#include "opcert/slicing.hpp"

using namespace opcert;

namespace {

int failures = 0;

double now_s() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

void criterion(int num, const std::string& label,
               const std::function<bool(std::string&)>& body) {
  std::string detail;
  double t0 = now_s();
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double dt = now_s() - t0;
  std::printf("[%s] criterion %2d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", num,
              label.c_str(), dt, detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

bool approx(double x, double target, double tol) {
  return std::abs(x - target) <= tol;
}

void collect_leaves(const json& j, const std::string& prefix,
                    std::vector<std::string>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) collect_leaves(v, prefix + "/" + k, out);
  } else if (j.is_array()) {
    for (size_t i = 0; i < j.size(); ++i)
      collect_leaves(j[i], prefix + "/" + std::to_string(i), out);
  } else {
    out.push_back(prefix);
  }
}

DomainPtr box2(double h) {
  return std::make_shared<const GridDomain>(
      GridDomain::box(2, h, {0.0, 0.0}, {1.0, 1.0}));
}

GridField indicator2(DomainPtr dom, int dim_v) {
  GridField u(dom, dim_v);
  u.fill([dim_v](const std::vector<double>& x) {
    bool in = x[0] > 0.25 && x[0] < 0.75 && x[1] > 0.25 && x[1] < 0.75;
    std::vector<double> v(dim_v, 0.0);
    v[0] = in ? 1.0 : 0.0;
    return v;
  });
  return u;
}

GridField smooth2(DomainPtr dom, int dim_v) {
  GridField u(dom, dim_v);
  u.fill([dim_v](const std::vector<double>& x) {
    std::vector<double> v(dim_v, 0.0);
    v[0] = x[0] * x[0] * x[1] + 0.5 * x[1];
    if (dim_v > 1) v[1] = x[0] + x[1] * x[1] * x[1];
    return v;
  });
  return u;
}

}  // namespace

int main() {
  auto catalog = builtin_catalog();
  std::vector<Report> reports;
  for (const auto& entry : catalog) reports.push_back(classify(entry.op));

  criterion(1, "ellipticity certification with analytic bounds", [&](std::string& d) {
    double t0 = now_s();
    auto gr = check_r_elliptic(make_gradient(2));
    auto gc = check_c_elliptic(make_gradient(2));
    double t_grad = now_s() - t0;
    t0 = now_s();
    auto sr = check_r_elliptic(make_sym_gradient(2));
    double t_sym = now_s() - t0;
    t0 = now_s();
    auto cr_r = check_r_elliptic(make_cauchy_riemann());
    auto cr_c = check_c_elliptic(make_cauchy_riemann());
    double t_cr = now_s() - t0;

    bool ok = gr.verdict == Verdict::elliptic && gr.lower_bound >= 1.0 - 1e-6 &&
              gc.verdict == Verdict::elliptic;
    ok = ok && sr.verdict == Verdict::elliptic &&
         sr.lower_bound >= 0.7071 - 1e-3 && sr.lower_bound <= 0.7072;
    ok = ok && cr_r.verdict == Verdict::elliptic &&
         cr_c.verdict == Verdict::not_elliptic && cr_c.witness_xi &&
         cr_c.witness_kernel;
    if (ok) {
      GRat ratio = (*cr_c.witness_xi)[1] / (*cr_c.witness_xi)[0];
      ok = ratio.re == 0 && (ratio.im == 1 || ratio.im == -1);
      auto img = eval_symbol_complex(make_cauchy_riemann(), *cr_c.witness_xi) *
                 *cr_c.witness_kernel;
      ok = ok && vec_is_zero(img) && !vec_is_zero(*cr_c.witness_kernel);
    }
    ok = ok && t_grad <= 10.0 && t_sym <= 10.0 && t_cr <= 10.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "grad R>=%.8f, sym2 R=%.6f, CR witness xi=(1,+-i); "
                  "%.1fs/%.1fs/%.1fs",
                  gr.lower_bound, sr.lower_bound, t_grad, t_sym, t_cr);
    d = buf;
    return ok;
  });

  criterion(2, "constant rank r = dimV for every elliptic catalog operator",
            [&](std::string& d) {
    bool ok = true;
    int checked = 0;
    for (size_t i = 0; i < catalog.size(); ++i) {
      const auto& exp = catalog[i].expected;
      if (!exp.r_elliptic || !*exp.r_elliptic) continue;
      ++checked;
      const auto& rc = reports[i].rank_cert;
      if (rc.verdict != RankVerdict::constant_rank ||
          rc.r != catalog[i].op.dim_v() ||
          !(rc.minors_vacuous || rc.minors_vanish) || rc.sigma_r_lower <= 0)
        ok = false;
    }
    d = std::to_string(checked) + " elliptic operators checked";
    return ok && checked == 7;
  });

  criterion(3, "rank-one / mixing certificates across the catalog",
            [&](std::string& d) {
    bool ok = true;
    for (size_t i = 0; i < catalog.size(); ++i) {
      const std::string& name = catalog[i].op.name();
      const auto& ro = reports[i].rank_one;
      if (name.rfind("gradient", 0) == 0 || name.rfind("sym_gradient", 0) == 0) {
        if (!ro.span.complete || ro.mixing.verdict != MixingVerdict::holds)
          ok = false;
        for (const auto& t : ro.span.triples)
          if (!verify_rank_one_triple(catalog[i].op, t)) ok = false;
      }
      if (name == "sym_gradient2d") {
        // the span contains (e1, e1*, e1 (x) e1), i.e. w* along (1,0,0)
        bool found = false;
        for (const auto& t : ro.span.triples)
          if (t.w_star[1] == 0 && t.w_star[2] == 0 && t.w_star[0] != 0)
            found = true;
        RankOneTriple canonical{{Rat(1), Rat(0), Rat(0)},
                                {Rat(1), Rat(0)},
                                {Rat(1), Rat(0)}};
        if (!found || !verify_rank_one_triple(catalog[i].op, canonical)) ok = false;
      }
      if (name == "cauchy_riemann" &&
          (ro.mixing.verdict != MixingVerdict::fails ||
           reports[i].c_cert.verdict != Verdict::not_elliptic))
        ok = false;
      if (!reports[i].consistent) ok = false;
      if (!check_expected(reports[i], catalog[i].expected).empty()) ok = false;
    }
    d = "complete spans, CR mixing-fails, zero consistency flags";
    return ok;
  });

  criterion(4, "polarization gamma = 1 with exact quadratic witness",
            [&](std::string& d) {
    Operator op = make_sym_gradient(2);
    auto wit = polarize(op, {{Rat(1), Rat(0)}, {Rat(1), Rat(0)}},
                        {{Rat(0), Rat(1)}, {Rat(0), Rat(1)}});
    bool ok = wit.gamma == 1 && verify_polarization(op, wit);
    auto deg = polarize(op, {{Rat(1), Rat(0)}, {Rat(1), Rat(0)}},
                        {{Rat(2), Rat(0)}, {Rat(3), Rat(0)}});
    ok = ok && deg.gamma == 1 && verify_polarization(op, deg);
    d = "coordinate pairs and degenerate parallel branch";
    return ok;
  });

  criterion(5, "pullback injectivity and 2D restriction closure",
            [&](std::string& d) {
    bool ok = true;
    for (const auto& entry : catalog)
      if (!nullspace(detail::pullback_system(entry.op)).empty()) ok = false;
    int runs = 0;
    for (const auto& entry : catalog) {
      if (!entry.expected.rank_one || !*entry.expected.rank_one) continue;
      const Operator& op = entry.op;
      std::vector<Vec<Rat>> vfull;
      for (int j = 0; j < op.dim_v(); ++j) vfull.push_back(unit_vec(op.dim_v(), j));
      SubspaceBasis vsub(op.dim_v(), vfull);
      for (int k = 0; k < 20; ++k) {
        SubspaceBasis plane(
            op.n(), {detail::generic_rational_point(op.n(), 2 * k + 1),
                     detail::generic_rational_point(op.n(), 2 * k + 43)});
        Operator r = restrict_operator(op, plane, vsub);
        auto rep = check_rank_one_property(r);
        if (!rep.span.complete || !rep.consistent) ok = false;
        ++runs;
      }
    }
    d = std::to_string(runs) + " restrictions re-classified";
    return ok && runs == 80;
  });

  criterion(6, "polynomial kernel dimensions and stabilization",
            [&](std::string& d) {
    auto find = [&](const std::string& name) -> const Report& {
      for (size_t i = 0; i < catalog.size(); ++i)
        if (catalog[i].op.name() == name) return reports[i];
      throw ValidationError("catalog entry missing: " + name);
    };
    const auto& g = find("gradient2d").kernel;
    const auto& s = find("sym_gradient2d").kernel;
    const auto& c = find("cauchy_riemann").kernel;
    bool ok = g.dims[0] == 1 && g.stabilization_degree &&
              *g.stabilization_degree == 0;
    ok = ok && s.dims[1] == 3 && s.stabilization_degree &&
         *s.stabilization_degree == 1;
    ok = ok && c.dims == std::vector<int>{2, 4, 6, 8, 10} &&
         !c.stabilization_degree;
    d = "gradient l=0, rigid motions l=1, holomorphic growth";
    return ok;
  });

  criterion(7, "slicing inequality on the corpus and h-ladder",
            [&](std::string& d) {
    auto rep = verify_slicing(indicator2(box2(1.0 / 256), 1), make_gradient(2),
                              {{Rat(1), Rat(0)}, {Rat(1), Rat(0)}, {Rat(1)}});
    bool ok = rep.lhs >= 0.97 && rep.lhs <= 1.03 && rep.rhs >= 1.96 &&
              rep.rhs <= 2.08 && rep.pass;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "indicator lhs=%.4f rhs=%.4f", rep.lhs, rep.rhs);
    d = buf;

    struct Case {
      Operator op;
      RankOneTriple triple;
    };
    std::vector<Case> cases{
        {make_gradient(2), {{Rat(1), Rat(0)}, {Rat(1), Rat(0)}, {Rat(1)}}},
        {make_sym_gradient(2),
         {{Rat(1), Rat(0), Rat(0)}, {Rat(1), Rat(0)}, {Rat(1), Rat(0)}}}};
    for (const auto& cs : cases) {
      double prev_slack = 0;
      for (double h : {1.0 / 64, 1.0 / 128, 1.0 / 256}) {
        auto dom = box2(h);
        auto ind = verify_slicing(indicator2(dom, cs.op.dim_v()), cs.op, cs.triple);
        if (!ind.pass) ok = false;
        auto sm = verify_slicing(smooth2(dom, cs.op.dim_v()), cs.op, cs.triple);
        if (!sm.pass) ok = false;
        if (prev_slack > 0) {
          double ratio = sm.slack / prev_slack;
          if (ratio < 0.4 || ratio > 0.6) ok = false;
        }
        prev_slack = sm.slack;
      }
    }
    // 3D coverage on a coarse ladder
    for (double h : {1.0 / 16, 1.0 / 32}) {
      auto dom = std::make_shared<const GridDomain>(
          GridDomain::box(3, h, {0, 0, 0}, {1, 1, 1}));
      GridField u(dom, 1);
      u.fill([](const std::vector<double>& x) {
        bool in = x[0] > 0.25 && x[0] < 0.75 && x[1] > 0.25 && x[1] < 0.75 &&
                  x[2] > 0.25 && x[2] < 0.75;
        return std::vector<double>{in ? 1.0 : 0.0};
      });
      auto r3 = verify_slicing(u, make_gradient(3),
                               {{Rat(1), Rat(0), Rat(0)},
                                {Rat(1), Rat(0), Rat(0)},
                                {Rat(1)}});
      if (!r3.pass) ok = false;
    }
    return ok;
  });

  criterion(8, "translation modulus: unit slope and bounded fits",
            [&](std::string& d) {
    double h = 1.0 / 128;
    auto dom = box2(h);
    GridField half(dom, 1);
    half.fill([](const std::vector<double>& x) {
      return std::vector<double>{x[0] < 0.5 ? 1.0 : 0.0};
    });
    bool ok = true;
    for (int k : {1, 2, 4, 8, 16}) {
      auto rep = translation_defect(half, k * h, {1.0, 0.0}, {1.0});
      if (!approx(rep.defect / (k * h), 1.0, 0.02)) ok = false;
    }
    // fitted slope vs the slicing-based bound TV * |w*| / |xi|
    Operator op = make_gradient(2);
    for (const GridField& u : {half, indicator2(dom, 1), smooth2(dom, 1)}) {
      double slope = 0;
      int count = 0;
      for (int k : {1, 2, 4, 8}) {
        slope += translation_defect(u, k * h, {1.0, 0.0}, {1.0}).defect / (k * h);
        ++count;
      }
      slope /= count;
      double bound = apply_operator_fd(u, op).total_variation();
      if (slope > 1.1 * bound) ok = false;
    }
    d = "defect/s = 1 on the jump line; slopes within 1.1x the TV bound";
    return ok;
  });

  criterion(9, "boundary strip estimate on the graph domain a = 1 + x'/2",
            [&](std::string& d) {
    auto gdom = std::make_shared<const GridDomain>(GridDomain::graph(
        2, 1.0 / 128, {0.0, 0.0}, {1.0, 1.5},
        [](const std::vector<double>& x) { return 1.0 + 0.5 * x[0]; }));
    GridField u(gdom, 1);
    u.fill([](const std::vector<double>&) { return std::vector<double>{1.0}; });
    auto rep = boundary_strip_estimate(
        u, make_gradient(2), {{Rat(1), Rat(0)}, {Rat(1), Rat(0)}, {Rat(1)}},
        0.2, 0.1);
    bool ok = approx(rep.lhs, 0.1, 0.002) &&
              approx(rep.rho1, 2.0 / std::sqrt(5.0), 1e-9) &&
              rep.rhs >= rep.lhs && rep.pass;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "lhs=%.5f rhs=%.5f rho1=%.5f", rep.lhs,
                  rep.rhs, rep.rho1);
    d = buf;
    return ok;
  });

  criterion(10, "certificate integrity: re-validation and mutation rejection",
            [&](std::string& d) {
    bool ok = true;
    std::vector<json> emitted;
    for (size_t i = 0; i < catalog.size(); ++i)
      emitted.push_back(report_to_json(reports[i], "acceptance"));
    for (const auto& cert : emitted)
      if (!verify_report_json(cert).ok) ok = false;

    // byte determinism: fresh classification, identical serialization
    json again = report_to_json(classify(catalog.front().op), "acceptance");
    json first = emitted.front();
    first.erase("elapsed_seconds");
    again.erase("elapsed_seconds");
    if (first.dump() != again.dump()) ok = false;

    json target = report_to_json(classify(make_divergence(2)), "acceptance");
    std::vector<std::string> leaves;
    collect_leaves(target, "", leaves);
    std::erase_if(leaves, [](const std::string& p) {
      return p == "/timestamp" || p == "/elapsed_seconds";
    });
    int step = std::max<int>(1, static_cast<int>(leaves.size()) / 100);
    int rejected = 0, tried = 0;
    for (int k = 0; k < 100 && size_t(k) * step < leaves.size(); ++k) {
      json mutated = target;
      json::json_pointer p(leaves[size_t(k) * step]);
      json& leaf = mutated[p];
      if (leaf.is_boolean())
        leaf = !leaf.get<bool>();
      else if (leaf.is_number_integer())
        leaf = leaf.get<long long>() + 1;
      else if (leaf.is_number())
        leaf = leaf.get<double>() + 0.125;
      else if (leaf.is_string())
        leaf = leaf.get<std::string>() + "x";
      else
        leaf = 42;
      ++tried;
      if (!verify_report_json(mutated).ok) ++rejected;
    }
    ok = ok && tried == 100 && rejected == tried;
    d = std::to_string(rejected) + "/" + std::to_string(tried) +
        " mutations rejected";
    return ok;
  });

  if (failures) {
    std::printf("ACCEPTANCE: %d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("ACCEPTANCE: all criteria passed\n");
  return 0;
}
