#include <gtest/gtest.h>

#include <random>

#include "semialg/errors.h"
#include "semialg/poly.h"
#include "semialg/program.h"

namespace semialg {

void PrintTo(const RatPolynomial& p, std::ostream* os) { *os << p.to_string(); }

namespace {

class PolyTest : public ::testing::Test {
 protected:
  UniversePtr xy = make_universe({"x", "y"});
  RatPolynomial P(std::string_view text) const { return parse_polynomial(text, xy); }
};

TEST_F(PolyTest, AdditionCancels) {
  EXPECT_EQ(P("x + y") + P("x - y"), P("2*x"));
  EXPECT_EQ(P("x^2") + P("x^2"), P("2*x^2"));
  const RatPolynomial p = P("3*x*y - y^3 + 1/2");
  EXPECT_EQ(p + RatPolynomial(xy), p);
  EXPECT_TRUE((p - p).is_zero());
}

TEST_F(PolyTest, Multiplication) {
  EXPECT_EQ(P("x + y") * P("x + y"), P("x^2 + 2*x*y + y^2"));
  EXPECT_EQ(P("x - 1") * P("x + 1"), P("x^2 - 1"));
  const RatPolynomial p = P("x^3*y - 7");
  EXPECT_EQ(p * RatPolynomial(xy, 1), p);
  EXPECT_EQ(P("x + 1").pow(3), P("x^3 + 3*x^2 + 3*x + 1"));
}

TEST_F(PolyTest, ZeroHasNoTerms) {
  const RatPolynomial z(xy);
  EXPECT_TRUE(z.is_zero());
  EXPECT_EQ(z.degree(), kZeroDegree);
  EXPECT_EQ(z.evaluate({Rational(3), Rational(-8)}), 0);
  EXPECT_TRUE((P("x") * z).is_zero());
}

TEST_F(PolyTest, DegreeAndVariables) {
  const RatPolynomial p = P("x^2*y + y^4 - x");
  EXPECT_EQ(p.degree(), 4);
  EXPECT_EQ(p.degree_in({0}), 2);
  EXPECT_EQ(p.variables(), (std::vector<int>{0, 1}));
  EXPECT_EQ(P("y - 1").variables(), std::vector<int>{1});
}

TEST(PolySubstitute, ConsecutionOfExample22) {
  const UniversePtr u = make_universe({"a", "x", "y"});
  const RatPolynomial inv = parse_polynomial("y^2 + x + a - 6", u);
  const RatPolynomial result =
      inv.substitute({{1, parse_polynomial("x + 0.25*y^2 + 1", u)},
                      {2, parse_polynomial("0.5*y", u)}});
  EXPECT_EQ(result, parse_polynomial("1/2*y^2 + x + a - 5", u));
}

TEST_F(PolyTest, IdentityBindingsLeavePolynomial) {
  const RatPolynomial p = P("x^3 - 2*x*y + 5");
  EXPECT_EQ(p.substitute({{0, P("x")}, {1, P("y")}}), p);
  EXPECT_EQ(p.substitute({}), p);
}

TEST_F(PolyTest, SequentialUpdateComposition) {
  // x := x*x + y - 1; y := x*y + y + 1 with the new x.
  const RatPolynomial x1 = P("x*x + y - 1");
  const RatPolynomial y1 = P("x*y + y + 1").substitute({{0, x1}});
  EXPECT_EQ(x1, P("x^2 + y - 1"));
  EXPECT_EQ(y1, P("x^2*y + y^2 + 1"));
}

TEST_F(PolyTest, SubstituteIntoOtherUniverse) {
  const UniversePtr t = make_universe({"y", "s"});
  const RatPolynomial p = P("x^2 + y");
  const RatPolynomial q = p.substitute({{0, parse_polynomial("s + 1", t)}}, t);
  EXPECT_EQ(q, parse_polynomial("s^2 + 2*s + 1 + y", t));
}

TEST_F(PolyTest, Evaluate) {
  EXPECT_EQ(P("x^2 + y^2").evaluate({Rational(1), Rational(1)}), 2);
  EXPECT_EQ(P("1/3*x - y").evaluate({Rational(1, 2), Rational(-1, 6)}), Rational(1, 3));
  EXPECT_DOUBLE_EQ(evaluate_float(P("x*y - 1/4"), {0.5, 0.5}), 0.0);
}

TEST(PolyEvaluate, PrintedOverviewP2AtAnchor) {
  const UniversePtr ab = make_universe({"a", "b"});
  const FloatPolynomial p2 = to_float(parse_polynomial(
      "0.18645935858312943*a^2 + 0.925510976100242*a + 1.0000005956843994*b"
      " + 3.803019854318091",
      ab));
  const double v = p2.evaluate({-2.0, -3.959980272907701});
  EXPECT_NEAR(v, -1.2621, 5e-5);
  EXPECT_LE(v, 0.0);
}

TEST(MonomialBasis, Sizes) {
  const UniversePtr u = make_universe({"a", "b", "x", "y"});
  EXPECT_EQ(monomial_basis(*u, {2, 3}, 1).size(), 3u);
  EXPECT_EQ(monomial_basis(*u, {0, 1, 2, 3}, 2).size(), 15u);
  EXPECT_EQ(basis_size(4, 2), 15);
  EXPECT_EQ(basis_size(3, 4), 35);
  EXPECT_EQ(monomial_basis(*u, {0, 1}, 3, 2).size(), 7u);
}

TEST(MonomialBasis, GradedOrder) {
  const UniversePtr u = make_universe({"x"});
  const auto basis = monomial_basis(*u, {0}, 3);
  ASSERT_EQ(basis.size(), 4u);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(basis[k], Monomial::variable(1, 0, k));

  const UniversePtr v = make_universe({"x", "y"});
  const auto b2 = monomial_basis(*v, {0, 1}, 2);
  const std::vector<Monomial> expected = {Monomial({0, 0}), Monomial({1, 0}), Monomial({0, 1}),
                                          Monomial({2, 0}), Monomial({1, 1}), Monomial({0, 2})};
  EXPECT_EQ(b2, expected);
}

TEST(CoeffVector, Examples) {
  const UniversePtr u = make_universe({"x"});
  const auto basis = monomial_basis(*u, {0}, 2);
  EXPECT_EQ(coeff_vector(parse_polynomial("x^2 - 1", u), basis),
            (std::vector<Rational>{-1, 0, 1}));
  EXPECT_EQ(coeff_vector(RatPolynomial(u), basis), (std::vector<Rational>{0, 0, 0}));

  const UniversePtr v = make_universe({"x", "y"});
  const auto b2 = monomial_basis(*v, {0, 1}, 2);
  const auto c = coeff_vector(parse_polynomial("2*x*y", v), b2);
  int nonzero = 0;
  for (const auto& e : c) nonzero += e != 0;
  EXPECT_EQ(nonzero, 1);
  EXPECT_EQ(c[4], 2);
}

TEST(CoeffVector, TermOutsideBasisThrows) {
  const UniversePtr u = make_universe({"x"});
  EXPECT_THROW(coeff_vector(parse_polynomial("x^3", u), monomial_basis(*u, {0}, 2)), UsageError);
}

TEST(Universe, MixingUniversesThrows) {
  const RatPolynomial p = parse_polynomial("x", make_universe({"x"}));
  const RatPolynomial q = parse_polynomial("x", make_universe({"x", "y"}));
  EXPECT_THROW(p + q, UsageError);
  EXPECT_EQ(p.rebase(q.universe()), q);
}

TEST(Rationals, ParseAndPrint) {
  EXPECT_EQ(parse_rational("12"), 12);
  EXPECT_EQ(parse_rational("-3/4"), Rational(-3, 4));
  EXPECT_EQ(parse_rational("0.25"), Rational(1, 4));
  EXPECT_EQ(parse_rational("1e-3"), Rational(1, 1000));
  EXPECT_EQ(parse_rational("2.5E+2"), 250);
  EXPECT_EQ(rational_to_string(Rational(-3, 4)), "-3/4");
  EXPECT_EQ(rational_to_string(Rational(7)), "7");
}

TEST(Rationals, DoubleConversionIsExact) {
  const Rational tenth = rational_from_double(0.1);
  EXPECT_EQ(tenth, Rational(mpz_class("3602879701896397"), mpz_class("36028797018963968")));
  EXPECT_EQ(rational_to_double(tenth), 0.1);
  EXPECT_EQ(double_to_string(0.1), "0.1");
}

Rational ratio(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Random polynomials over {x, y, z} with small rational coefficients.
class PolyProperty : public ::testing::Test {
 protected:
  UniversePtr u = make_universe({"x", "y", "z"});
  std::mt19937_64 rng{20261014};

  RatPolynomial random_poly(int max_degree, int terms) {
    std::uniform_int_distribution<int> coef(-9, 9);
    std::uniform_int_distribution<int> expo(0, max_degree);
    RatPolynomial p(u);
    for (int t = 0; t < terms; ++t) {
      std::vector<int> e(3);
      int budget = max_degree;
      for (int& k : e) {
        k = std::min(expo(rng), budget);
        budget -= k;
      }
      p.add_term(Monomial(e), ratio(coef(rng), 1 + (coef(rng) + 9) % 4));
    }
    return p;
  }

  std::vector<Rational> random_point() {
    std::uniform_int_distribution<int> num(-20, 20);
    return {ratio(num(rng), 7), ratio(num(rng), 3), ratio(num(rng), 5)};
  }
};

TEST_F(PolyProperty, RingAxioms) {
  for (int trial = 0; trial < 50; ++trial) {
    const RatPolynomial p = random_poly(3, 5), q = random_poly(3, 5), r = random_poly(2, 4);
    EXPECT_EQ(p + q, q + p);
    EXPECT_EQ(p * q, q * p);
    EXPECT_EQ((p + q) + r, p + (q + r));
    EXPECT_EQ((p * q) * r, p * (q * r));
    EXPECT_EQ(p * (q + r), p * q + p * r);
    EXPECT_TRUE((p - p).is_zero());
  }
}

TEST_F(PolyProperty, EvaluationIsAHomomorphism) {
  for (int trial = 0; trial < 50; ++trial) {
    const RatPolynomial p = random_poly(3, 6), q = random_poly(3, 6);
    const auto pt = random_point();
    EXPECT_EQ((p * q).evaluate(pt), p.evaluate(pt) * q.evaluate(pt));
    EXPECT_EQ((p - q).evaluate(pt), p.evaluate(pt) - q.evaluate(pt));
  }
}

TEST_F(PolyProperty, EvaluateAfterSubstitute) {
  for (int trial = 0; trial < 40; ++trial) {
    const RatPolynomial p = random_poly(3, 6);
    const RatPolynomial f = random_poly(2, 3), g = random_poly(2, 3);
    const auto pt = random_point();
    const RatPolynomial composed = p.substitute({{0, f}, {2, g}});
    EXPECT_EQ(composed.evaluate(pt), p.evaluate({f.evaluate(pt), pt[1], g.evaluate(pt)}));
  }
}

TEST_F(PolyProperty, SubstitutionComposes) {
  for (int trial = 0; trial < 20; ++trial) {
    const RatPolynomial p = random_poly(2, 4);
    const RatPolynomial f = random_poly(2, 3), g = random_poly(1, 3);
    const RatPolynomial stepwise = p.substitute({{0, f}}).substitute({{0, g}});
    const RatPolynomial direct = p.substitute({{0, f.substitute({{0, g}})}});
    EXPECT_EQ(stepwise, direct);
  }
}

TEST_F(PolyProperty, CoefficientVectorRoundTrip) {
  const auto basis = monomial_basis(*u, {0, 1, 2}, 3);
  for (int trial = 0; trial < 30; ++trial) {
    const RatPolynomial p = random_poly(3, 7);
    EXPECT_EQ(from_coeff_vector(u, basis, coeff_vector(p, basis)), p);
  }
}

TEST_F(PolyProperty, PrintParseRoundTrip) {
  for (int trial = 0; trial < 30; ++trial) {
    const RatPolynomial p = random_poly(4, 6);
    EXPECT_EQ(parse_polynomial(p.to_string(), u), p) << p.to_string();
  }
}

TEST_F(PolyProperty, CompiledMatchesExactEvaluation) {
  for (int trial = 0; trial < 30; ++trial) {
    const RatPolynomial p = random_poly(4, 8);
    const CompiledPolynomial c(p);
    const auto pt = random_point();
    const std::vector<double> fp = {pt[0].get_d(), pt[1].get_d(), pt[2].get_d()};
    const double exact = rational_to_double(p.evaluate(pt));
    EXPECT_NEAR(c.evaluate(fp), exact, 1e-9 * (1 + std::abs(exact)));
    EXPECT_NEAR(evaluate_float(p, fp), exact, 1e-9 * (1 + std::abs(exact)));
  }
}

}  // namespace
}  // namespace semialg
