#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "opcert/catalog.hpp"
#include "opcert/certify.hpp"

using namespace opcert;

namespace {

// Independent oracle: dense angular scan of the smallest singular value
// over the real unit circle (n = 2 operators only).
double circle_scan_min(const Operator& op, int samples = 20000) {
  detail::FloatSymbol fs(op);
  double best = 1e300;
  for (int k = 0; k < samples; ++k) {
    double t = 3.14159265358979323846 * k / samples;
    best = std::min(best, detail::injectivity_sigma(fs.at({std::cos(t), std::sin(t)})));
  }
  return best;
}

Operator duplicated_row_op() {
  // symbol [[x1, x2], [x1, x2]]: rank 1 everywhere, 2x2 minors vanish
  Mat<Rat> a1(2, 2), a2(2, 2);
  a1(0, 0) = 1;
  a1(1, 0) = 1;
  a2(0, 1) = 1;
  a2(1, 1) = 1;
  return Operator(2, 2, 2, {a1, a2}, "dup_row");
}

Operator diagonal_drop_op() {
  // symbol diag(x1, x2): rank 2 generically, rank 1 on the axes
  Mat<Rat> a1(2, 2), a2(2, 2);
  a1(0, 0) = 1;
  a2(1, 1) = 1;
  return Operator(2, 2, 2, {a1, a2}, "diag_drop");
}

}  // namespace

TEST_CASE("sym gradient 2d: R-elliptic with the analytic 1/sqrt(2) bound") {
  Operator op = make_sym_gradient(2);
  double analytic = 1.0 / std::sqrt(2.0);
  CHECK(circle_scan_min(op) == doctest::Approx(analytic).epsilon(1e-6));

  auto cert = check_r_elliptic(op);
  CHECK(cert.verdict == Verdict::elliptic);
  CHECK(cert.lower_bound >= analytic - 1e-3);
  CHECK(cert.lower_bound <= 0.7072);
}

TEST_CASE("gradient 2d: R-elliptic with near-sharp bound") {
  Operator op = make_gradient(2);
  CHECK(circle_scan_min(op) == doctest::Approx(1.0).epsilon(1e-12));
  auto cert = check_r_elliptic(op);
  CHECK(cert.verdict == Verdict::elliptic);
  CHECK(cert.lower_bound >= 1.0 - 1e-6);
  CHECK(cert.lower_bound <= 1.0);
}

TEST_CASE("gradient: C-elliptic, injectivity constant 1 on the complex sphere") {
  Operator op = make_gradient(2);
  // oracle: |(a + ib)|-column has sigma = sqrt(|a|^2 + |b|^2) = 1 on the sphere
  detail::FloatSymbol fs(op);
  std::uint64_t state = 12345;
  for (int k = 0; k < 200; ++k) {
    std::vector<double> x(4);
    double nrm = 0;
    for (auto& xi : x) {
      state = state * 6364136223846793005ull + 1442695040888963407ull;
      xi = double(state >> 11) / double(1ull << 53) - 0.5;
      nrm += xi * xi;
    }
    nrm = std::sqrt(nrm);
    for (auto& xi : x) xi /= nrm;
    CHECK(detail::injectivity_sigma_c(fs.at_complex(x)) == doctest::Approx(1.0).epsilon(1e-9));
  }
  auto cert = check_c_elliptic(op);
  CHECK(cert.verdict == Verdict::elliptic);
  CHECK(cert.lower_bound > 0);
  CHECK(cert.lower_bound <= 1.0 + 1e-12);
}

TEST_CASE("cauchy-riemann: R-elliptic but not C-elliptic, exact witness") {
  Operator op = make_cauchy_riemann();
  auto r = check_r_elliptic(op);
  CHECK(r.verdict == Verdict::elliptic);
  CHECK(r.lower_bound > 0.9);  // det = x1^2 + x2^2: sigma = 1 on the circle

  auto c = check_c_elliptic(op);
  REQUIRE(c.verdict == Verdict::not_elliptic);
  REQUIRE(c.witness_xi.has_value());
  REQUIRE(c.witness_kernel.has_value());
  // the witness direction is proportional to (1, i) or (1, -i)
  GRat ratio = (*c.witness_xi)[1] / (*c.witness_xi)[0];
  CHECK(ratio.re == 0);
  CHECK((ratio.im == 1 || ratio.im == -1));
  // exact kernel identity
  auto img = eval_symbol_complex(op, *c.witness_xi) * *c.witness_kernel;
  CHECK(vec_is_zero(img));
  CHECK(!vec_is_zero(*c.witness_kernel));
}

TEST_CASE("deviatoric sym gradient 2d mirrors cauchy-riemann ellipticity") {
  Operator op = make_dev_sym_gradient(2);
  CHECK(check_r_elliptic(op).verdict == Verdict::elliptic);
  auto c = check_c_elliptic(op);
  REQUIRE(c.verdict == Verdict::not_elliptic);
  auto img = eval_symbol_complex(op, *c.witness_xi) * *c.witness_kernel;
  CHECK(vec_is_zero(img));
}

TEST_CASE("divergence: structurally not elliptic with exact witness") {
  Operator op = make_divergence(2);
  auto r = check_r_elliptic(op);
  REQUIRE(r.verdict == Verdict::not_elliptic);
  REQUIRE(r.witness_xi.has_value());
  auto img = eval_symbol_complex(op, *r.witness_xi) * *r.witness_kernel;
  CHECK(vec_is_zero(img));
  CHECK(check_c_elliptic(op).verdict == Verdict::not_elliptic);
}

TEST_CASE("small budget degrades to indeterminate, never flips the verdict") {
  CertifyBudget tiny;
  tiny.max_boxes = 50;
  auto cert = check_r_elliptic(make_sym_gradient(2), tiny);
  CHECK(cert.verdict != Verdict::not_elliptic);
}

TEST_CASE("constant rank: catalog operators at full rank") {
  for (const auto& name_rank :
       std::vector<std::pair<Operator, int>>{{make_gradient(2), 1},
                                             {make_sym_gradient(2), 2},
                                             {make_cauchy_riemann(), 2}}) {
    auto cert = check_constant_rank(name_rank.first);
    CHECK(cert.verdict == RankVerdict::constant_rank);
    CHECK(cert.r == name_rank.second);
    CHECK(cert.minors_vacuous);  // r = min(M, N) for these
    CHECK(cert.sigma_r_lower > 0);
  }
}

TEST_CASE("constant rank via identically vanishing minors") {
  auto cert = check_constant_rank(duplicated_row_op());
  CHECK(cert.verdict == RankVerdict::constant_rank);
  CHECK(cert.r == 1);
  CHECK(!cert.minors_vacuous);
  CHECK(cert.minor_count == 1);
  CHECK(cert.minors_vanish);
  CHECK(cert.sigma_r_lower > 0);
}

TEST_CASE("rank drop detected with an exact point") {
  auto cert = check_constant_rank(diagonal_drop_op());
  REQUIRE(cert.verdict == RankVerdict::not_constant_rank);
  REQUIRE(cert.drop_point.has_value());
  int dropped = rank(eval_symbol(diagonal_drop_op(), *cert.drop_point));
  CHECK(dropped == cert.drop_rank);
  CHECK(dropped < cert.r);
}

TEST_CASE("polynomial kernels: gradient and rigid motions") {
  auto kg = kernel_polynomials(make_gradient(2), 4);
  CHECK(kg.dims == std::vector<int>{1, 1, 1, 1, 1});
  REQUIRE(kg.stabilization_degree.has_value());
  CHECK(*kg.stabilization_degree == 0);

  Operator sym = make_sym_gradient(2);
  auto ks = kernel_polynomials(sym, 4);
  CHECK(ks.dims == std::vector<int>{2, 3, 3, 3, 3});
  CHECK(*ks.stabilization_degree == 1);
  // every basis element is annihilated exactly
  for (const auto& p : ks.basis)
    for (const auto& comp : apply_operator_poly(sym, p)) CHECK(comp.is_zero());
  // the rotation (-y, x) lies in the degree-4 kernel
  std::vector<Poly> rot{-Poly::variable(2, 1), Poly::variable(2, 0)};
  for (const auto& comp : apply_operator_poly(sym, rot)) CHECK(comp.is_zero());
}

TEST_CASE("polynomial kernels: holomorphic growth without stabilization") {
  auto k = kernel_polynomials(make_cauchy_riemann(), 4);
  CHECK(k.dims == std::vector<int>{2, 4, 6, 8, 10});
  CHECK(!k.stabilization_degree.has_value());
  Operator cr = make_cauchy_riemann();
  for (const auto& p : k.basis)
    for (const auto& comp : apply_operator_poly(cr, p)) CHECK(comp.is_zero());
}

TEST_CASE("polynomial kernels: conformal fields of the 3d deviatoric operator") {
  Operator dev = make_dev_sym_gradient(3);
  auto k = kernel_polynomials(dev, 4);
  CHECK(k.dims == std::vector<int>{3, 7, 10, 10, 10});
  REQUIRE(k.stabilization_degree.has_value());
  CHECK(*k.stabilization_degree == 2);
  for (const auto& p : k.basis)
    for (const auto& comp : apply_operator_poly(dev, p)) CHECK(comp.is_zero());
}
