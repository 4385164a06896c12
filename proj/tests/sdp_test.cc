#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <unistd.h>

#include "semialg/conditions.h"
#include "semialg/ipm.h"
#include "semialg/sdp.h"
#include "semialg/sdpa_format.h"
#include "semialg/sos.h"

namespace semialg {
namespace {

TEST(Compile, DiagonalSosToy) {
  // x^2 + 1 = [1 x] G [1 x]^T.
  SdpBuilder b;
  const int blk = b.add_block("sigma0", 2);
  const int r1 = b.add_row(1, "1"), rx = b.add_row(0, "x"), rxx = b.add_row(1, "x^2");
  b.add_entry(r1, blk, 0, 0, 1);
  b.add_entry(rx, blk, 0, 1, 1);
  b.add_entry(rxx, blk, 1, 1, 1);
  const SdpProblem prob = b.build();
  ASSERT_EQ(prob.blocks.size(), 1u);
  EXPECT_EQ(prob.blocks[0].dim, 2);
  EXPECT_EQ(prob.num_rows, 3);

  const std::vector<double> lhs = prob.apply({Eigen::MatrixXd::Identity(2, 2)}, {});
  for (int r = 0; r < 3; ++r) EXPECT_DOUBLE_EQ(lhs[r], prob.rhs[r]);
  const SdpSolution sol = solve(prob, {});
  EXPECT_TRUE(sol.usable());
  EXPECT_LT(sol.primal_residual, 1e-8);
}

TEST(Compile, RankOneSosToy) {
  // (x + y)^2 over the basis [1, x, y].
  SdpBuilder b;
  const int blk = b.add_block("sigma0", 3);
  const int r1 = b.add_row(0), rx = b.add_row(0), ry = b.add_row(0);
  const int rxx = b.add_row(1), rxy = b.add_row(2), ryy = b.add_row(1);
  b.add_entry(r1, blk, 0, 0, 1);
  b.add_entry(rx, blk, 0, 1, 1);
  b.add_entry(ry, blk, 0, 2, 1);
  b.add_entry(rxx, blk, 1, 1, 1);
  b.add_entry(rxy, blk, 1, 2, 1);
  b.add_entry(ryy, blk, 2, 2, 1);
  const SdpProblem prob = b.build();
  Eigen::MatrixXd g(3, 3);
  g << 0, 0, 0, 0, 1, 1, 0, 1, 1;
  const std::vector<double> lhs = prob.apply({g}, {});
  for (int r = 0; r < prob.num_rows; ++r) EXPECT_DOUBLE_EQ(lhs[r], prob.rhs[r]);
  const SdpSolution sol = solve(prob, {});
  ASSERT_TRUE(sol.usable());
  EXPECT_NEAR(sol.blocks[0](1, 2), 1.0, 1e-6);
}

SdpProblem min_t_problem() {
  // min t  s.t.  X = diag(t, t) - I is PSD.
  SdpBuilder b;
  const int blk = b.add_block("X", 2);
  const int t = b.add_free(1.0, "t");
  const int r0 = b.add_row(-1), r1 = b.add_row(-1), r01 = b.add_row(0);
  b.add_entry(r0, blk, 0, 0, 1);
  b.add_free_coef(r0, t, -1);
  b.add_entry(r1, blk, 1, 1, 1);
  b.add_free_coef(r1, t, -1);
  b.add_entry(r01, blk, 0, 1, 1);
  return b.build();
}

TEST(Solve, EigenvalueBound) {
  const SdpSolution sol = solve(min_t_problem(), {});
  ASSERT_EQ(sol.status, SdpStatus::kOptimal);
  ASSERT_EQ(sol.free_values.size(), 1u);
  EXPECT_NEAR(sol.free_values[0], 1.0, 1e-6);
  EXPECT_NEAR(sol.primal_objective, 1.0, 1e-6);
}

TEST(Solve, InconsistentRowIsInfeasible) {
  SdpBuilder b;
  const int blk = b.add_block("X", 1);
  const int r = b.add_row(1, "0 = 1");
  (void)r;
  const int r2 = b.add_row(1);
  b.add_entry(r2, blk, 0, 0, 1);
  EXPECT_EQ(solve(b.build(), {}).status, SdpStatus::kInfeasible);
}

TEST(Solve, NegativeDiagonalIsInfeasible) {
  SdpBuilder b;
  const int blk = b.add_block("X", 2);
  b.add_entry(b.add_row(-1), blk, 0, 0, 1);
  b.add_entry(b.add_row(1), blk, 1, 1, 1);
  EXPECT_EQ(solve(b.build(), {}).status, SdpStatus::kInfeasible);
}

// p involves only the parameters, which come first in the joint universe.
double at_params(const FloatPolynomial& p, std::vector<double> params) {
  params.resize(p.universe()->size(), 0.0);
  return p.evaluate(params);
}

class Example22 : public ::testing::Test {
 protected:
  ConditionSet cs;
  void SetUp() override {
    const auto [loop, tmpl] = corpus("example22");
    cs = build_conditions(loop, tmpl);
  }
  SosProgram relax(int cond, int degree, int p_degree = 0) const {
    RelaxationOptions ro;
    ro.degree = degree;
    ro.p_degree = p_degree;
    return build_relaxation(cs.problems[cond], ro);
  }
};

TEST_F(Example22, InitiationObjectiveMatchesOracleIntegral) {
  const SosProgram sos = relax(0, 2);
  const SdpSolution sol = solve(compile(sos), {});
  ASSERT_TRUE(sol.usable());
  // Trapezoid rule for the mean of phi_0 over [-5, 5].
  const int n = 100;
  double integral = 0;
  for (int k = 0; k <= n; ++k) {
    const double a = -5 + 10.0 * k / n;
    const double w = (k == 0 || k == n) ? 0.5 : 1.0;
    integral += w * phi_oracle(cs.problems[0], {a}, 120);
  }
  integral /= n;
  EXPECT_NEAR(integral, -1.75, 0.01);
  EXPECT_NEAR(sol.primal_objective, integral, 0.1);
}

TEST_F(Example22, RecoveredPBoundsPhiFromAbove) {
  const SosProgram sos = relax(0, 1);
  const SdpSolution sol = solve(compile(sos), {});
  ASSERT_TRUE(sol.usable());
  const FloatPolynomial p = recover_p(sol, sos);
  for (int k = 0; k < 1000; ++k) {
    const double a = -5 + 10.0 * k / 999;
    EXPECT_GE(at_params(p, {a}), phi_oracle(cs.problems[0], {a}, 60) - 1e-4) << a;
  }
}

TEST_F(Example22, RecoveredPStaysAboveMinusM) {
  for (int c = 0; c < 3; ++c) {
    const SosProgram sos = relax(c, 1);
    const SdpSolution sol = solve(compile(sos), {});
    ASSERT_TRUE(sol.usable()) << c;
    const FloatPolynomial p = recover_p(sol, sos);
    for (int k = 0; k <= 200; ++k) EXPECT_GE(at_params(p, {-5 + 0.05 * k}), -10 - 1e-6);
  }
}

TEST_F(Example22, HierarchyIsMonotone) {
  for (int c : {0, 1}) {
    double previous = INFINITY;
    for (int d = 1; d <= 2; ++d) {
      const SdpSolution sol = solve(compile(relax(c, d)), {});
      ASSERT_TRUE(sol.usable());
      EXPECT_LE(sol.primal_objective, previous + 1e-6) << c << " d=" << d;
      previous = sol.primal_objective;
    }
  }
}

TEST_F(Example22, CompileIsDeterministic) {
  std::ostringstream a, b;
  write_sdpa(to_sdpa(compile(relax(1, 2))), a);
  write_sdpa(to_sdpa(compile(relax(1, 2))), b);
  EXPECT_EQ(a.str(), b.str());
}

// p = a - 1.75 with sigma0 = (x - 1/2)^2 and the disk multiplier 1 solve
// identity (A); p + M = 3.25 + 5 (a' + 1) solves identity (B).
SdpSolution hand_certificate(const SosProgram& sos) {
  SdpSolution sol;
  sol.status = SdpStatus::kOptimal;
  for (const auto& s : sos.slots) {
    sol.blocks.push_back(Eigen::MatrixXd::Zero(s.basis.size(), s.basis.size()));
  }
  auto slot = [&](const std::string& label) {
    for (size_t i = 0; i < sos.slots.size(); ++i) {
      if (sos.slots[i].label == label) return static_cast<int>(i);
    }
    ADD_FAILURE() << "no slot " << label;
    return 0;
  };
  auto index_of = [&](const GramSlot& s, const Monomial& m) {
    for (size_t i = 0; i < s.basis.size(); ++i) {
      if (s.basis[i] == m) return static_cast<int>(i);
    }
    ADD_FAILURE() << "monomial missing from basis";
    return 0;
  };
  const int n = sos.universe->size();
  const Monomial one(n), x = Monomial::variable(n, 1);
  // In scaled coordinates x = 2.02 x', so x - 1/2 = 2.02 x' - 1/2.
  const int s0 = slot("A.sigma0");
  const int i1 = index_of(sos.slots[s0], one), ix = index_of(sos.slots[s0], x);
  Eigen::MatrixXd& g = sol.blocks[s0];
  g(i1, i1) = 0.25;
  g(ix, ix) = 2.02 * 2.02;
  g(i1, ix) = g(ix, i1) = -0.5 * 2.02;
  sol.blocks[slot("A.K[0]")](0, 0) = 1;
  const int b0 = slot("B.sigma0");
  const int j1 = index_of(sos.slots[b0], one);
  sol.blocks[b0](j1, j1) = 3.25;
  sol.blocks[slot("B.box_lo[a]")](0, 0) = 5;
  sol.free_values = {-1.75, 5.0};
  return sol;
}

TEST_F(Example22, CertifyExactPoint) {
  const SosProgram sos = relax(0, 1, 1);
  ASSERT_EQ(sos.p_basis.size(), 2u);
  const SdpSolution sol = hand_certificate(sos);
  const CertificateReport rep = certify_identity(sol, sos);
  EXPECT_LT(rep.max_relative_residual, 1e-12);
  EXPECT_FALSE(rep.flagged);
  EXPECT_GE(rep.min_eigenvalue, -1e-12);
  const FloatPolynomial p = recover_p(sol, sos);
  EXPECT_NEAR(at_params(p, {1.0}), -0.75, 1e-12);
}

TEST_F(Example22, CertifyFlagsPerturbedGram) {
  const SosProgram sos = relax(0, 1, 1);
  SdpSolution sol = hand_certificate(sos);
  sol.blocks[0](0, 0) += 1e-3;
  const CertificateReport rep = certify_identity(sol, sos);
  EXPECT_TRUE(rep.flagged);
  EXPECT_GT(rep.max_relative_residual, 1e-6);
}

TEST_F(Example22, SolvedCertificatesAreClean) {
  for (int c = 0; c < 3; ++c) {
    const SosProgram sos = relax(c, 2);
    const SdpSolution sol = solve(compile(sos), {});
    ASSERT_TRUE(sol.usable());
    const CertificateReport rep = certify_identity(sol, sos);
    EXPECT_LE(rep.max_relative_residual, 1e-6) << c;
    EXPECT_EQ(rep.identities.size(), 2u);
  }
}

TEST(RecoverP, OverviewInitiationIsAffineInB) {
  const auto [loop, tmpl] = corpus("overview");
  const ConditionProblem c = build_conditions(loop, tmpl).problems[0];
  RelaxationOptions ro;
  ro.degree = 1;
  const SosProgram sos = build_relaxation(c, ro);
  const SdpSolution sol = solve(compile(sos), {});
  ASSERT_TRUE(sol.usable());
  const FloatPolynomial p = recover_p(sol, sos);
  const int b = 1;
  EXPECT_NEAR(p.coefficient(Monomial::variable(p.universe()->size(), b)), 1.0, 0.01);
  for (const auto& [m, coef] : p.terms()) {
    if (m[b] >= 2 || (m[b] == 1 && m[0] > 0)) EXPECT_LT(std::fabs(coef), 1e-4) << p.to_string();
  }
}

TEST(SdpaFormat, WriteReadRoundTrip) {
  const SdpaProblem sdpa = to_sdpa(min_t_problem());
  std::stringstream io;
  write_sdpa(sdpa, io);
  const SdpaProblem back = read_sdpa(io);
  EXPECT_EQ(back.num_constraints, sdpa.num_constraints);
  EXPECT_EQ(back.block_struct, sdpa.block_struct);
  EXPECT_EQ(back.c, sdpa.c);
  ASSERT_EQ(back.entries.size(), sdpa.entries.size());
  for (size_t i = 0; i < back.entries.size(); ++i) {
    EXPECT_EQ(back.entries[i].matrix, sdpa.entries[i].matrix);
    EXPECT_DOUBLE_EQ(back.entries[i].value, sdpa.entries[i].value);
  }
}

TEST(SdpaFormat, FreeVariablesBecomeDiagonalPair) {
  const SdpaProblem sdpa = to_sdpa(min_t_problem());
  ASSERT_EQ(sdpa.block_struct.size(), 2u);
  EXPECT_EQ(sdpa.block_struct[0], 2);
  EXPECT_EQ(sdpa.block_struct[1], -2);
  EXPECT_EQ(sdpa.num_constraints, 3);
}

TEST(SdpaFormat, FileExchangeAgreesWithInternal) {
  const auto [loop, tmpl] = corpus("example22");
  const ConditionSet cs = build_conditions(loop, tmpl);
  RelaxationOptions ro;
  ro.degree = 1;
  const SosProgram sos = build_relaxation(cs.problems[2], ro);
  const SdpProblem prob = compile(sos);
  const SdpSolution internal = solve(prob, {});

  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / ("semialg_sdpa_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  SolverSettings s;
  s.backend = Backend::kFileExchange;
  s.exchange_dir = dir.string();
  s.exchange_command = SDPA_INTERNAL_BINARY;
  const SdpSolution external = solve(prob, s);
  std::filesystem::remove_all(dir);

  ASSERT_TRUE(internal.usable());
  ASSERT_TRUE(external.usable()) << external.message;
  EXPECT_NEAR(external.primal_objective, internal.primal_objective, 1e-6);
  const FloatPolynomial p1 = recover_p(internal, sos), p2 = recover_p(external, sos);
  for (int k = 0; k <= 20; ++k) EXPECT_NEAR(at_params(p1, {-5 + 0.5 * k}), at_params(p2, {-5 + 0.5 * k}), 1e-5);
}

TEST(SdpaFormat, MissingCommandFails) {
  SolverSettings s;
  s.backend = Backend::kFileExchange;
  s.exchange_dir = std::filesystem::temp_directory_path().string();
  s.exchange_command = "/nonexistent/sdpa";
  EXPECT_FALSE(solve(min_t_problem(), s).usable());
}

}  // namespace
}  // namespace semialg
