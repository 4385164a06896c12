#include <gtest/gtest.h>

#include <cmath>

#include "semialg/conditions.h"
#include "semialg/errors.h"

namespace semialg {

void PrintTo(const RatPolynomial& p, std::ostream* os) { *os << p.to_string(); }

namespace {

RatPolynomial joint(const ConditionProblem& c, std::string_view text) {
  return parse_polynomial(text, c.universe);
}

TEST(BuildConditions, Example22Implications) {
  const auto [loop, tmpl] = corpus("example22");
  const ConditionSet cs = build_conditions(loop, tmpl);
  ASSERT_EQ(cs.problems.size(), 3u);
  const auto& p = cs.problems;

  EXPECT_EQ(p[0].kind, ConditionKind::kInitiation);
  EXPECT_EQ(p[0].id(), "0.0");
  EXPECT_EQ(p[0].objective, joint(p[0], "y^2 + x + a - 6"));
  EXPECT_EQ(p[0].domain.constraints, std::vector<RatPolynomial>{joint(p[0], "x^2 + y^2 - 4")});

  EXPECT_EQ(p[1].kind, ConditionKind::kConsecution);
  EXPECT_EQ(p[1].objective, joint(p[1], "1/2*y^2 + x + 1 + a - 6"));
  EXPECT_EQ(p[1].domain.constraints,
            (std::vector<RatPolynomial>{joint(p[1], "x - 4"), joint(p[1], "y^2 + x + a - 6")}));

  EXPECT_EQ(p[2].kind, ConditionKind::kPostcondition);
  EXPECT_EQ(p[2].objective, joint(p[2], "x - 7"));
  EXPECT_EQ(p[2].domain.constraints,
            (std::vector<RatPolynomial>{joint(p[2], "4 - x"), joint(p[2], "y^2 + x + a - 6")}));

  EXPECT_EQ(implication_string(p[0]), "(y^2 + x^2 - 4 <= 0) ==> (y^2 + x + a - 6 <= 0)");
  EXPECT_EQ(implication_string(p[1]),
            "(x - 4 <= 0) && (y^2 + x + a - 6 <= 0) ==> (1/2*y^2 + x + a - 5 <= 0)");
  EXPECT_EQ(implication_string(p[2]),
            "(-x + 4 <= 0) && (y^2 + x + a - 6 <= 0) ==> (x - 7 <= 0)");
}

TEST(BuildConditions, OverviewConsecutionExpands) {
  const auto [loop, tmpl] = corpus("overview");
  const ConditionSet cs = build_conditions(loop, tmpl);
  ASSERT_EQ(cs.problems.size(), 3u);
  const ConditionProblem& c2 = cs.problems[1];
  EXPECT_EQ(c2.objective,
            joint(c2, "a*x^4*y^2 + 2*a*x^2*y^3 + a*y^4 + x^4 + 2*a*x^2*y + 2*x^2*y + 2*a*y^2"
                      " - 2*x^2 + y^2 - 2*y + a + b + 1"));
  EXPECT_EQ(c2.domain.constraints,
            (std::vector<RatPolynomial>{joint(c2, "x^2 + y^2 - 3"), joint(c2, "x^2 + a*y^2 + b")}));
  const ConditionProblem& c3 = cs.problems[2];
  EXPECT_EQ(c3.objective, joint(c3, "x^2 - 2*y^2 - 4"));
  EXPECT_EQ(c3.domain.constraints,
            (std::vector<RatPolynomial>{joint(c3, "3 - x^2 - y^2"), joint(c3, "x^2 + a*y^2 + b")}));
}

TEST(BuildConditions, CountIsBranchesPlusTwo) {
  for (const auto& name : corpus_names()) {
    const auto [loop, tmpl] = corpus(name);
    if (tmpl.conjuncts.size() != 1 || loop.post.size() != 1) continue;
    EXPECT_EQ(build_conditions(loop, tmpl).problems.size(), loop.branches.size() + 2) << name;
  }
}

TEST(BuildConditions, ConjunctsSplitIntoSubIndices) {
  const GuardedLoop loop = parse_program(corpus_source("example22"));
  const TemplateSpec tmpl = parse_template("y^2 + x + a - 6 && x - b", loop);
  const ConditionSet cs = build_conditions(loop, tmpl);
  // Two initiation and two consecution obligations plus one postcondition.
  ASSERT_EQ(cs.problems.size(), 5u);
  EXPECT_EQ(cs.problems[0].id(), "0.0");
  EXPECT_EQ(cs.problems[1].id(), "0.1");
  EXPECT_EQ(cs.problems[3].id(), "1.1");
  EXPECT_EQ(cs.problems[4].id(), "2.0");
  EXPECT_EQ(cs.problems[4].domain.constraints.size(), 3u);
}

TEST(BuildConditions, DisturbanceIsQuantified) {
  const auto [loop, tmpl] = corpus("dubins_disturbed");
  const ConditionSet cs = build_conditions(loop, tmpl);
  const ConditionProblem& c = cs.problems[1];
  EXPECT_EQ(c.num_disturbances, 1);
  EXPECT_EQ(c.quantified.size(), 3u);
  EXPECT_EQ(c.domain.box.size(), 3u);
  EXPECT_LE(c.domain.box[2].hi, Rational(1, 100));
  EXPECT_GE(c.domain.box[2].lo, Rational(-1, 100));
  // Initiation does not involve the update, so r stays out.
  EXPECT_EQ(cs.problems[0].num_disturbances, 0);
}

TEST(BuildConditions, TighteningKeepsAnOuterBox) {
  const auto [loop, tmpl] = corpus("example22");
  const ConditionSet tight = build_conditions(loop, tmpl);
  ConditionOptions loose_opts;
  loose_opts.tighten = false;
  const ConditionSet loose = build_conditions(loop, tmpl, loose_opts);
  for (size_t i = 0; i < tight.problems.size(); ++i) {
    const Box& t = tight.problems[i].domain.box;
    const Box& l = loose.problems[i].domain.box;
    for (size_t k = 0; k < t.size(); ++k) {
      EXPECT_GE(t[k].lo, l[k].lo);
      EXPECT_LE(t[k].hi, l[k].hi);
    }
    EXPECT_EQ(l, uniform_box(2, -100, 100));
  }
  // The disk x^2 + y^2 <= 4 fits in [-2, 2]^2 up to outward rounding.
  for (const auto& iv : tight.problems[0].domain.box) {
    EXPECT_LE(iv.hi, Rational(21, 10));
    EXPECT_GE(iv.hi, 2);
  }
}

TEST(BuildConditions, ContainsUsesConstraintsAndBox) {
  const auto [loop, tmpl] = corpus("example22");
  const ConditionProblem c = build_conditions(loop, tmpl).problems[0];
  EXPECT_TRUE(c.domain.contains({Rational(0), Rational(1), Rational(1)}));
  EXPECT_FALSE(c.domain.contains({Rational(0), Rational(2), Rational(1)}));
  EXPECT_EQ(c.domain.all_constraints().size(), 1u + 2 * c.domain.box_vars.size());
}

TEST(PhiOracle, InitiationMatchesClosedForm) {
  const auto [loop, tmpl] = corpus("example22");
  const ConditionProblem c = build_conditions(loop, tmpl).problems[0];
  for (double a : {-5.0, -2.0, -0.5, 0.0, 1.0, 3.0}) {
    EXPECT_NEAR(phi_oracle(c, {a}, 400), a - 1.75, 0.05) << a;
  }
  // Far below the clamp the oracle returns -M.
  ConditionProblem deep = c;
  deep.big_m = 1;
  EXPECT_DOUBLE_EQ(phi_oracle(deep, {-5.0}, 50), -1.0);
}

TEST(PhiOracle, EmptyDomainGivesMinusM) {
  const auto [loop, tmpl] = corpus("example22");
  ConditionProblem c = build_conditions(loop, tmpl).problems[2];
  // x >= 4 cannot hold on this box.
  c.domain.box = {{Rational(0), Rational(1, 10)}, {Rational(0), Rational(1, 10)}};
  EXPECT_DOUBLE_EQ(phi_oracle(c, {0.3}, 40), -10.0);
}

TEST(PhiOracle, Example22ValidSet) {
  const auto [loop, tmpl] = corpus("example22");
  const ConditionSet cs = build_conditions(loop, tmpl);
  double lo = INFINITY, hi = -INFINITY;
  for (int k = -100; k <= 50; ++k) {
    const double a = k / 50.0;
    double m = -INFINITY;
    for (const auto& c : cs.problems) m = std::max(m, phi_oracle(c, {a}, 200));
    if (m <= 0) {
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
  }
  EXPECT_NEAR(lo, -1.0, 0.05);
  EXPECT_NEAR(hi, 0.0, 0.05);
}

TEST(TightenDomainBox, ProvedEmptyGivesEmptyBox) {
  const UniversePtr u = make_universe({"a", "x"});
  SemialgSet s;
  s.universe = u;
  s.constraints = {parse_polynomial("x^2 + 1 + a^2", u)};
  s.box_vars = {1};
  s.box = {{Rational(-10), Rational(10)}};
  EXPECT_TRUE(tighten_domain_box(s, {0}, {{Rational(-1), Rational(1)}}).empty());
}

}  // namespace
}  // namespace semialg
