#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opcert/linalg.hpp"
#include "opcert/poly.hpp"
#include "opcert/rational.hpp"

using namespace opcert;

TEST_CASE("rational parsing and printing") {
  CHECK(parse_rat("3/4") == Rat(3, 4));
  CHECK(parse_rat("-7") == Rat(-7));
  CHECK(parse_rat("-6/8") == Rat(-3, 4));
  CHECK_THROWS_AS(parse_rat("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rat("x"), std::invalid_argument);
  CHECK(rat_to_string(Rat(10, 4)) == "5/2");
  CHECK(rat_to_string(Rat(-3)) == "-3");
}

TEST_CASE("continued fraction rationalization") {
  CHECK(*rationalize(0.5) == Rat(1, 2));
  CHECK(*rationalize(-2.0 / 3.0) == Rat(-2, 3));
  CHECK(*rationalize(1.0) == Rat(1));
  // irrational: no small-denominator hit at tight accuracy
  CHECK(!rationalize(std::sqrt(2.0), 1000, 1e-12).has_value());
}

TEST_CASE("gaussian rational field ops") {
  GRat i(Rat(0), Rat(1));
  CHECK(i * i == GRat(-1));
  GRat z(Rat(2), Rat(-3));
  CHECK(z / z == GRat(1));
  CHECK((z * z.conj()).im == 0);
  CHECK_THROWS(z / GRat(0));
}

TEST_CASE("rref rank nullspace") {
  Mat<Rat> a(3, 4, {Rat(1), Rat(2), Rat(0), Rat(1),
                    Rat(2), Rat(4), Rat(1), Rat(3),
                    Rat(3), Rat(6), Rat(1), Rat(4)});
  CHECK(rank(a) == 2);
  auto ns = nullspace(a);
  CHECK(ns.size() == 2);
  for (const auto& v : ns) CHECK(vec_is_zero(a * v));
}

TEST_CASE("solve consistent and inconsistent") {
  Mat<Rat> a(2, 2, {Rat(1), Rat(2), Rat(3), Rat(4)});
  Vec<Rat> b{Rat(5), Rat(11)};
  auto x = solve(a, b);
  REQUIRE(x.has_value());
  CHECK(a * *x == b);

  Mat<Rat> s(2, 1, {Rat(1), Rat(2)});
  CHECK(!solve(s, Vec<Rat>{Rat(1), Rat(3)}).has_value());
}

TEST_CASE("inverse exact") {
  Mat<Rat> a(2, 2, {Rat(2), Rat(1), Rat(7), Rat(4)});
  Mat<Rat> ai = inverse(a);
  CHECK(a * ai == Mat<Rat>::identity(2));
  Mat<Rat> sing(2, 2, {Rat(1), Rat(2), Rat(2), Rat(4)});
  CHECK_THROWS(inverse(sing));
}

TEST_CASE("column space and span intersection") {
  std::vector<Vec<Rat>> u{{Rat(1), Rat(0), Rat(0)}, {Rat(0), Rat(1), Rat(0)}};
  std::vector<Vec<Rat>> v{{Rat(0), Rat(1), Rat(0)}, {Rat(0), Rat(0), Rat(1)}};
  auto inter = intersect_spans(3, u, v);
  REQUIRE(inter.size() == 1);
  CHECK(inter[0][0] == 0);
  CHECK(inter[0][1] != 0);
  CHECK(inter[0][2] == 0);

  std::vector<Vec<Rat>> w{{Rat(0), Rat(0), Rat(1)}};
  CHECK(intersect_spans(3, u, w).empty());
}

TEST_CASE("complex nullspace over Q(i)") {
  // [1 i; -i 1] has rank 1 over C
  Mat<GRat> a(2, 2);
  a(0, 0) = GRat(1);
  a(0, 1) = GRat(Rat(0), Rat(1));
  a(1, 0) = GRat(Rat(0), Rat(-1));
  a(1, 1) = GRat(1);
  CHECK(rank(a) == 1);
  auto ns = nullspace(a);
  REQUIRE(ns.size() == 1);
  CHECK(vec_is_zero(a * ns[0]));
}

TEST_CASE("polynomial ring and symbolic determinant") {
  Poly x = Poly::variable(2, 0);
  Poly y = Poly::variable(2, 1);
  Poly p = x * x - y * y;
  Poly q = (x - y) * (x + y);
  CHECK(p == q);
  CHECK(p.eval({Rat(3), Rat(2)}) == Rat(5));
  CHECK(p.derivative(0) == Poly::variable(2, 0, Rat(2)));

  // det [[x, y], [y, x]] = x^2 - y^2
  Mat<Poly> m(2, 2);
  m(0, 0) = x;
  m(0, 1) = y;
  m(1, 0) = y;
  m(1, 1) = x;
  CHECK(det_laplace(m) == p);

  // identically zero determinant of proportional rows
  Mat<Poly> z(2, 2);
  z(0, 0) = x;
  z(0, 1) = y;
  z(1, 0) = x;
  z(1, 1) = y;
  CHECK(det_laplace(z).is_zero());
}

TEST_CASE("monomial enumeration") {
  auto m2 = monomials_up_to_degree(2, 2);
  CHECK(m2.size() == 6);  // 1, x, y, x^2, xy, y^2
  auto m3 = monomials_up_to_degree(3, 4);
  CHECK(m3.size() == 35);  // C(3+4,4)
}
