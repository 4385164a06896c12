#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <unistd.h>

#include "semialg/errors.h"
#include "semialg/posterior.h"
#include "semialg/smtlib.h"

namespace semialg {

void PrintTo(const RatPolynomial& p, std::ostream* os) { *os << p.to_string(); }

namespace {

Rational q(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

// SEMIALG_INV_SMT_SOLVER, else z3 on PATH, else empty.
std::string find_solver() {
  if (const char* env = std::getenv("SEMIALG_INV_SMT_SOLVER"); env && *env) return env;
  const char* path = std::getenv("PATH");
  if (!path) return {};
  std::string dirs = path;
  size_t start = 0;
  while (start <= dirs.size()) {
    const size_t end = std::min(dirs.find(':', start), dirs.size());
    const std::filesystem::path p = std::filesystem::path(dirs.substr(start, end - start)) / "z3";
    if (::access(p.c_str(), X_OK) == 0) return p.string();
    start = end + 1;
  }
  return {};
}

std::filesystem::path scratch_dir(const std::string& tag) {
  return std::filesystem::temp_directory_path() /
         ("semialg_post_" + tag + "_" + std::to_string(::getpid()));
}

TEST(RoundDecimal, Ladder) {
  EXPECT_EQ(round_decimal(-1.999999999993848, 1), -2);
  EXPECT_EQ(round_decimal(-3.959980272907701, 5), q(-395998, 100000));
  EXPECT_EQ(round_decimal(-3.959980272907701, 1), -4);
  for (int d = 0; d <= 6; ++d) EXPECT_EQ(round_decimal(0.5, d), d == 0 ? 1 : q(1, 2)) << d;
}

TEST(RoundDecimal, TiesGoAwayFromZero) {
  EXPECT_EQ(round_decimal(0.25, 1), q(3, 10));
  EXPECT_EQ(round_decimal(-0.25, 1), q(-3, 10));
  EXPECT_EQ(round_decimal(2.5, 0), 3);
  EXPECT_THROW(round_decimal(NAN, 2), UsageError);
}

TEST(Rationalize, OverviewCandidate) {
  const RationalCandidate rc =
      rationalize({-1.999999999993848, -3.959980272907701}, uniform_box(2, -5, 5));
  ASSERT_FALSE(rc.levels.empty());
  EXPECT_EQ(rc.levels[0].denominator_cap, 10);
  EXPECT_EQ(rc.levels[0].values, (std::vector<Rational>{-2, -4}));
  bool saw_five = false;
  for (const auto& lv : rc.levels) {
    if (lv.denominator_cap == 100000) {
      saw_five = true;
      EXPECT_EQ(lv.values, (std::vector<Rational>{-2, q(-395998, 100000)}));
    }
    for (const auto& v : lv.values) EXPECT_EQ(mpz_class(std::to_string(lv.denominator_cap)) % v.get_den(), 0);
    EXPECT_FALSE(lv.margin.has_value());
  }
  EXPECT_TRUE(saw_five);
}

TEST(Rationalize, DuplicatesDroppedAndClamped) {
  EXPECT_EQ(rationalize({0.5}, uniform_box(1, -1, 1)).levels.size(), 1u);
  const RationalCandidate rc = rationalize({1.00004}, uniform_box(1, -1, 1));
  ASSERT_EQ(rc.levels.size(), 1u);
  EXPECT_EQ(rc.levels[0].values[0], 1);
  EXPECT_THROW(rationalize({0.5, 0.5}, uniform_box(1, -1, 1)), UsageError);
}

TEST(Rationalize, MarginsFromUnderapprox) {
  const UniversePtr params = make_universe({"a"});
  Underapprox u;
  u.params = params;
  u.param_box = uniform_box(1, -5, 5);
  u.entries.push_back({"0.0", {{u.param_box, to_float(parse_polynomial("a - 1/4", params))}}});
  const RationalCandidate rc = rationalize({0.123}, u.param_box, &u);
  ASSERT_EQ(rc.levels.size(), 3u);
  ASSERT_TRUE(rc.levels[0].margin.has_value());
  EXPECT_NEAR(*rc.levels[0].margin, 0.1 - 0.25, 1e-15);
  EXPECT_NEAR(*rc.levels[2].margin, 0.123 - 0.25, 1e-15);
}

TEST(Instantiate, ParametersDisappear) {
  const auto [loop, tmpl] = corpus("example22");
  const auto conds = instantiate_conditions(loop, tmpl, {q(-1, 2)});
  ASSERT_EQ(conds.size(), 3u);
  for (const auto& c : conds) {
    for (int v : c.objective.variables()) EXPECT_NE(v, 0) << c.id();
    for (const auto& g : c.domain.constraints) {
      for (int v : g.variables()) EXPECT_NE(v, 0) << c.id();
    }
  }
  EXPECT_EQ(conds[0].objective, parse_polynomial("y^2 + x - 13/2", conds[0].universe));
  EXPECT_THROW(instantiate_conditions(loop, tmpl, {}), UsageError);
}

TEST(Falsify, Example22OutsideValidSet) {
  const auto [loop, tmpl] = corpus("example22");
  const auto cx = falsify(loop, tmpl, {1});
  ASSERT_TRUE(cx.has_value());
  EXPECT_EQ(cx->condition_id, "1.0");
  EXPECT_GT(cx->violation, 0);
  ASSERT_EQ(cx->names, (std::vector<std::string>{"x", "y"}));

  // Replay the counterexample in exact arithmetic.
  const ConditionProblem c = instantiate_conditions(loop, tmpl, {1})[cx->condition_index];
  std::vector<Rational> pt = {1, cx->point[0], cx->point[1]};
  for (const auto& g : c.domain.constraints) EXPECT_LE(g.evaluate(pt), 0);
  EXPECT_EQ(c.objective.evaluate(pt), cx->violation);

  const auto low = falsify(loop, tmpl, {-2});
  ASSERT_TRUE(low.has_value());
  EXPECT_EQ(low->condition_id, "2.0");
}

TEST(Falsify, NoFalseRefutationInsideValidSet) {
  const auto [loop, tmpl] = corpus("example22");
  for (const Rational& a : {q(-1), q(-3, 4), q(-1, 2), q(-1, 4), q(0)}) {
    EXPECT_FALSE(falsify(loop, tmpl, {a}).has_value()) << a.get_str();
  }
}

TEST(Falsify, OverviewRoundedCandidateIsClean) {
  const auto [loop, tmpl] = corpus("overview");
  EXPECT_FALSE(falsify(loop, tmpl, {-2, q(-395998, 100000)}).has_value());
}

TEST(Falsify, SeededRunsAgree) {
  const auto [loop, tmpl] = corpus("example22");
  FalsifyOptions o;
  o.samples = 2000;
  o.seed = 5;
  const auto c1 = falsify(loop, tmpl, {q(1, 2)}, o);
  const auto c2 = falsify(loop, tmpl, {q(1, 2)}, o);
  ASSERT_TRUE(c1 && c2);
  EXPECT_EQ(c1->point, c2->point);
  o.samples = 0;
  EXPECT_THROW(falsify(loop, tmpl, {q(1, 2)}, o), UsageError);
}

TEST(SmtNumeral, Forms) {
  EXPECT_EQ(smt_numeral(q(-395998, 100000)), "(- (/ 395998 100000))");
  EXPECT_EQ(smt_numeral(q(1, 2)), "(/ 5 10)");
  EXPECT_EQ(smt_numeral(q(1, 3)), "(/ 1 3)");
  EXPECT_EQ(smt_numeral(q(7)), "7");
  EXPECT_EQ(smt_numeral(q(-7)), "(- 7)");
  for (const Rational& v : {q(-395998, 100000), q(1, 3), q(-7), q(3, 40)}) {
    EXPECT_EQ(smt_value(parse_sexprs(smt_numeral(v))[0]), v);
  }
}

TEST(EmitSmtlib, ScriptsRoundTrip) {
  const auto [loop, tmpl] = corpus("example22");
  const std::vector<Rational> a = {q(-1, 2)};
  const auto scripts = emit_smtlib(loop, tmpl, a);
  const auto conds = instantiate_conditions(loop, tmpl, a);
  ASSERT_EQ(scripts.size(), 3u);
  for (size_t i = 0; i < scripts.size(); ++i) {
    EXPECT_EQ(scripts[i].file_name, "cond_" + std::to_string(i) + ".smt2");
    const ParsedScript ps = parse_script(scripts[i].text);
    EXPECT_EQ(ps.logic, "QF_NRA");
    EXPECT_TRUE(ps.check_sat);
    EXPECT_EQ(ps.universe->names(), (std::vector<std::string>{"x", "y"}));
    ASSERT_FALSE(ps.atoms.empty());
    const SmtAtom& last = ps.atoms.back();
    EXPECT_TRUE(last.negated);
    EXPECT_EQ(last.relation, "<=");
    EXPECT_EQ(last.difference, conds[i].objective.rebase(ps.universe));
    // Four box bounds, the premise, then the negated consequent.
    EXPECT_EQ(ps.atoms.size(), 4 + conds[i].domain.constraints.size() + 1);
  }
  const std::string& post = scripts[2].text;
  EXPECT_NE(post.find("(assert (not (<= (+ (- 7) x) 0)))"), std::string::npos) << post;
}

TEST(EmitSmtlib, ConjunctsGetSubIndexNames) {
  const GuardedLoop loop = parse_program(corpus_source("example22"));
  const TemplateSpec tmpl = parse_template("y^2 + x + a - 6 && x - b", loop);
  const auto scripts = emit_smtlib(loop, tmpl, {q(-1, 2), q(10)});
  ASSERT_EQ(scripts.size(), 5u);
  EXPECT_EQ(scripts[0].file_name, "cond_0_0.smt2");
  EXPECT_EQ(scripts[3].file_name, "cond_1_1.smt2");
  EXPECT_EQ(scripts[4].file_name, "cond_2.smt2");
}

TEST(ParseModel, RationalAndRootValues) {
  const SmtModel m = parse_model(
      "(\n  (define-fun x () Real\n    (/ 3.0 2.0))\n  (define-fun y () Real (- 4.0))\n"
      "  (define-fun z () Real (root-obj (+ (^ z 2) (- 2)) 1))\n)");
  EXPECT_EQ(m.values.at("x"), q(3, 2));
  EXPECT_EQ(m.values.at("y"), -4);
  EXPECT_EQ(m.unparsed, std::vector<std::string>{"z"});
}

TEST(Verdict, Finalize) {
  Verdict v;
  finalize_verdict(v);
  EXPECT_EQ(v.overall, OverallVerdict::kCandidateOnly);
  v.conditions.resize(2);
  v.conditions[0].verdict = ConditionVerdict::kExternallyVerified;
  v.conditions[1].verdict = ConditionVerdict::kExternallyVerified;
  finalize_verdict(v);
  EXPECT_EQ(v.overall, OverallVerdict::kVerified);
  v.conditions[1].verdict = ConditionVerdict::kFalsified;
  finalize_verdict(v);
  EXPECT_EQ(v.overall, OverallVerdict::kRefuted);
  EXPECT_STREQ(to_string(OverallVerdict::kCandidateOnly), "candidate_only");
  EXPECT_STREQ(to_string(ConditionVerdict::kExternalUnknown), "external_unknown");
}

TEST(VerifyExternal, MissingSolverLeavesCandidate) {
  const auto [loop, tmpl] = corpus("example22");
  const auto dir = scratch_dir("missing");
  ExternalOptions o;
  o.solver = "/nonexistent/smt-solver";
  o.out_dir = dir.string();
  Verdict v;
  verify_external(emit_smtlib(loop, tmpl, {q(-1, 2)}), o, v);
  ASSERT_EQ(v.conditions.size(), 3u);
  for (const auto& c : v.conditions) {
    EXPECT_EQ(c.verdict, ConditionVerdict::kExternalUnknown);
    EXPECT_FALSE(c.solver_answer.empty());
    EXPECT_TRUE(std::filesystem::exists(c.smt_file));
  }
  EXPECT_EQ(v.overall, OverallVerdict::kCandidateOnly);
  std::filesystem::remove_all(dir);
}

TEST(VerifyExternal, Example22WithSolver) {
  const std::string solver = find_solver();
  if (solver.empty()) GTEST_SKIP() << "no SMT solver available";
  const auto [loop, tmpl] = corpus("example22");
  const auto dir = scratch_dir("solver");
  ExternalOptions o;
  o.solver = solver;
  o.out_dir = dir.string();
  o.threads = 3;

  Verdict good;
  verify_external(emit_smtlib(loop, tmpl, {q(-1, 2)}), o, good);
  EXPECT_EQ(good.overall, OverallVerdict::kVerified);
  for (const auto& c : good.conditions) EXPECT_EQ(c.solver_answer, "unsat") << c.condition_id;

  Verdict bad;
  verify_external(emit_smtlib(loop, tmpl, {1}), o, bad);
  EXPECT_EQ(bad.overall, OverallVerdict::kRefuted);
  ASSERT_EQ(bad.conditions.size(), 3u);
  EXPECT_EQ(bad.conditions[1].verdict, ConditionVerdict::kFalsified);
  if (bad.conditions[1].counterexample) EXPECT_GT(bad.conditions[1].counterexample->violation, 0);
  std::filesystem::remove_all(dir);
}

TEST(VerifyExternal, OverviewCandidateWithSolver) {
  const std::string solver = find_solver();
  if (solver.empty()) GTEST_SKIP() << "no SMT solver available";
  const auto [loop, tmpl] = corpus("overview");
  const auto dir = scratch_dir("overview");
  ExternalOptions o;
  o.solver = solver;
  o.out_dir = dir.string();
  o.threads = 3;
  Verdict v;
  verify_external(emit_smtlib(loop, tmpl, {-2, q(-395998, 100000)}), o, v);
  EXPECT_EQ(v.overall, OverallVerdict::kVerified);
  std::filesystem::remove_all(dir);
}

TEST(PosteriorCheck, LadderStopsAtFirstCleanLevel) {
  const auto [loop, tmpl] = corpus("example22");
  PosteriorOptions o;
  o.external.solver = "/nonexistent/smt-solver";
  o.external.out_dir = scratch_dir("ladder").string();
  const PosteriorResult r = posterior_check(loop, tmpl, {-0.6667}, o);
  EXPECT_EQ(r.verdict.level, 0);
  EXPECT_EQ(r.candidate.levels[0].values[0], q(-7, 10));
  EXPECT_EQ(r.verdict.overall, OverallVerdict::kCandidateOnly);
  std::filesystem::remove_all(o.external.out_dir);
}

TEST(PosteriorCheck, RefutedCandidateReportsFinestLevel) {
  const auto [loop, tmpl] = corpus("example22");
  PosteriorOptions o;
  o.falsify.samples = 20000;
  const PosteriorResult r = posterior_check(loop, tmpl, {0.98}, o);
  EXPECT_EQ(r.verdict.overall, OverallVerdict::kRefuted);
  EXPECT_EQ(r.verdict.level, static_cast<int>(r.candidate.levels.size()) - 1);
}

}  // namespace
}  // namespace semialg
