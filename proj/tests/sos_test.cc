#include <gtest/gtest.h>

#include <random>

#include "semialg/conditions.h"
#include "semialg/errors.h"
#include "semialg/sdp.h"
#include "semialg/sos.h"

namespace semialg {

void PrintTo(const RatPolynomial& p, std::ostream* os) { *os << p.to_string(); }

namespace {

Box box1(const Rational& lo, const Rational& hi) { return {{lo, hi}}; }

TEST(Moments, OneDimensionalClosedForm) {
  const Box b = box1(-1, 1);
  EXPECT_EQ(box_moment(b, {0}), 1);
  EXPECT_EQ(box_moment(b, {1}), 0);
  EXPECT_EQ(box_moment(b, {2}), Rational(1, 3));
  EXPECT_EQ(box_moment(box1(0, 2), {1}), 1);
  EXPECT_EQ(box_moment(box1(0, 2), {3}), 2);
}

TEST(Moments, ProductBox) {
  const Box b = uniform_box(2, -5, 5);
  EXPECT_EQ(box_moment(b, {2, 2}), Rational(625, 9));
  const MomentVector m = moments(b, 4);
  EXPECT_EQ(m.values.size(), 15u);
  EXPECT_EQ(m.exact(Monomial({2, 2})), Rational(625, 9));
  EXPECT_EQ(m.exact(Monomial({1, 3})), 0);
}

TEST(Moments, ProductBoxAgainstMonteCarlo) {
  // E[x^2] = 25/3 on [-5, 5], so the normalized moment of x^2 y^2 is 625/9.
  const Box b = uniform_box(2, -5, 5);
  const double exact = box_moment(b, {2, 2}).get_d();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5, 5);
  double sum = 0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double x = u(rng), y = u(rng);
    sum += x * x * y * y;
  }
  EXPECT_NEAR(sum / n, exact, 0.01 * exact);
}

TEST(Moments, MatchMonteCarloOnRandomBoxes) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> end(-40, 40);
  std::uniform_int_distribution<int> dim(1, 3);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = dim(rng);
    Box b;
    for (int k = 0; k < n; ++k) {
      int lo = end(rng), hi = end(rng);
      if (lo == hi) ++hi;
      if (lo > hi) std::swap(lo, hi);
      b.push_back({Rational(lo, 10), Rational(hi, 10)});
    }
    std::vector<int> alpha(n);
    std::uniform_int_distribution<int> e(0, 6 / n);
    for (int& a : alpha) a = e(rng);
    double sum = 0, sum_abs = 0;
    const int samples = 200000;
    std::vector<std::uniform_real_distribution<double>> us;
    for (const auto& iv : b) us.emplace_back(iv.lo.get_d(), iv.hi.get_d());
    for (int s = 0; s < samples; ++s) {
      double v = 1;
      for (int k = 0; k < n; ++k) v *= std::pow(us[k](rng), alpha[k]);
      sum += v;
      sum_abs += std::fabs(v);
    }
    const double exact = box_moment(b, alpha).get_d();
    EXPECT_NEAR(sum / samples, exact, 0.03 * sum_abs / samples + 1e-12) << trial;
  }
}

TEST(AffineMap, UnitBoxExamples) {
  const UniversePtr u = make_universe({"x"});
  AffineMap m;
  m.center = {Rational(1)};
  m.half = {Rational(1)};
  const RatPolynomial x = parse_polynomial("x", u);
  EXPECT_EQ(m.to_scaled(x), parse_polynomial("x + 1", u));
  EXPECT_EQ(m.to_original(x), parse_polynomial("x - 1", u));
  const RatPolynomial sq = parse_polynomial("x^2", u);
  EXPECT_EQ(m.to_original(m.to_scaled(sq)), sq);

  AffineMap wide;
  wide.center = {Rational(0)};
  wide.half = {Rational(100)};
  EXPECT_EQ(wide.to_scaled(x), parse_polynomial("100*x", u));
  EXPECT_EQ(wide.to_original(x), parse_polynomial("1/100*x", u));
  EXPECT_EQ(wide.point_to_scaled({50.0}), std::vector<double>{0.5});
}

TEST(ScaleToUnit, MapsBoxesOntoUnitCube) {
  const auto [loop, tmpl] = corpus("example22");
  const ConditionProblem c = build_conditions(loop, tmpl).problems[1];
  const auto [scaled, map] = scale_to_unit(c);
  for (const auto& iv : scaled.param_box) EXPECT_EQ(iv, (Interval{-1, 1}));
  for (const auto& iv : scaled.domain.box) EXPECT_EQ(iv, (Interval{-1, 1}));
  EXPECT_EQ(scaled.objective, map.to_scaled(c.objective));
  EXPECT_EQ(map.to_original(scaled.objective), c.objective);
  // x in [-100, 6] has center -47 and half-width 53.
  EXPECT_EQ(map.center[1], -47);
  EXPECT_EQ(map.half[1], 53);
}

TEST(ScaleToUnit, DegenerateIntervalThrows) {
  const auto [loop, tmpl] = corpus("example22");
  ConditionProblem c = build_conditions(loop, tmpl).problems[0];
  c.param_box = box1(1, 1);
  EXPECT_THROW(scale_to_unit(c), UsageError);
}

TEST(BuildRelaxation, Example22InitiationSlots) {
  const auto [loop, tmpl] = corpus("example22");
  const ConditionProblem c = build_conditions(loop, tmpl).problems[0];
  RelaxationOptions ro;
  ro.degree = 1;
  ro.p_degree = 1;
  const SosProgram sos = build_relaxation(c, ro);
  ASSERT_EQ(sos.identities.size(), 2u);
  EXPECT_EQ(sos.p_basis.size(), 2u);

  int sigma0 = 0, k = 0, box = 0, ball = 0, b_slots = 0;
  for (const auto& s : sos.slots) {
    if (s.identity == 1) {
      ++b_slots;
      continue;
    }
    if (s.label == "A.sigma0") {
      ++sigma0;
      EXPECT_EQ(s.basis.size(), 4u);  // 1, a, x, y
    } else if (s.label.rfind("A.K[", 0) == 0) {
      ++k;
      EXPECT_EQ(s.basis.size(), 1u);
    } else if (s.label.rfind("A.box_", 0) == 0) {
      ++box;
    } else if (s.label.rfind("A.ball_", 0) == 0) {
      ++ball;
    }
  }
  EXPECT_EQ(sigma0, 1);
  EXPECT_EQ(k, 1);
  EXPECT_EQ(box, 6);
  EXPECT_EQ(ball, 2);
  EXPECT_EQ(b_slots, 9);

  const SdpProblem prob = compile(sos);
  // One equality per monomial of degree <= 2 in (a, x, y), per identity.
  EXPECT_EQ(prob.num_rows, 2 * 10);
  EXPECT_EQ(prob.num_free(), 2);
  EXPECT_EQ(prob.blocks.size(), sos.slots.size());
  EXPECT_EQ(prob.blocks[0].dim, 4);
}

TEST(BuildRelaxation, ClampIdentityOffsetIsM) {
  const auto [loop, tmpl] = corpus("example22");
  const ConditionProblem c = build_conditions(loop, tmpl).problems[0];
  const SosProgram sos = build_relaxation(c, {});
  const SosIdentity& b = sos.identities[1];
  EXPECT_EQ(b.exact_offset, RatPolynomial(b.exact_offset.universe(), 10));
  // p = -M makes the left side of the clamp identity vanish, so all
  // multipliers of identity B can be zero.
  const RatPolynomial lhs = RatPolynomial(b.exact_offset.universe(), -10) + b.exact_offset;
  EXPECT_TRUE(lhs.is_zero());
}

TEST(BuildRelaxation, DefaultPDegree) {
  const auto [loop, tmpl] = corpus("overview");
  const ConditionProblem c = build_conditions(loop, tmpl).problems[1];
  for (int d = 1; d <= 2; ++d) {
    RelaxationOptions ro;
    ro.degree = d;
    const SosProgram sos = build_relaxation(c, ro);
    EXPECT_EQ(sos.p_degree, 2 * d);
    EXPECT_EQ(sos.objective.size(), sos.p_basis.size());
    EXPECT_DOUBLE_EQ(sos.objective[0], 1.0);
  }
}

TEST(BuildRelaxation, ScalingRoundTrip) {
  const auto [loop, tmpl] = corpus("example22");
  const ConditionSet cs = build_conditions(loop, tmpl);
  for (const auto& c : {cs.problems[0], cs.problems[2]}) {
    RelaxationOptions scaled_opts, plain_opts;
    plain_opts.scale = false;
    const SosProgram scaled = build_relaxation(c, scaled_opts);
    const SosProgram plain = build_relaxation(c, plain_opts);
    const SdpSolution s1 = solve(compile(scaled), {});
    const SdpSolution s2 = solve(compile(plain), {});
    ASSERT_TRUE(s1.usable());
    ASSERT_TRUE(s2.usable());
    const FloatPolynomial p1 = recover_p(s1, scaled);
    const FloatPolynomial p2 = recover_p(s2, plain);
    for (const auto& m : plain.p_basis) {
      EXPECT_NEAR(p1.coefficient(m), p2.coefficient(m), 1e-6) << c.id();
    }
  }
}

TEST(PartitionBox, CoversTheBox) {
  const Box b = uniform_box(2, -5, 5);
  const auto cells = partition_box(b, 2);
  ASSERT_EQ(cells.size(), 4u);
  Rational area = 0;
  for (const auto& cell : cells) area += (cell[0].hi - cell[0].lo) * (cell[1].hi - cell[1].lo);
  EXPECT_EQ(area, 100);
  EXPECT_EQ(cells[0][0], (Interval{-5, 0}));

  const auto [loop, tmpl] = corpus("overview");
  const ConditionProblem c = build_conditions(loop, tmpl).problems[0];
  EXPECT_EQ(restrict_params(c, cells[3]).param_box, cells[3]);
}

}  // namespace
}  // namespace semialg
