#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semialg/conditions.h"
#include "semialg/extract.h"
#include "semialg/poly.h"
#include "semialg/program.h"

namespace semialg {

struct RoundingLevel {
  /// Largest admitted denominator.
  long long denominator_cap = 0;
  std::vector<Rational> values;
  /// max_i p_i at the level when an underapproximation was supplied.
  std::optional<double> margin;
};

/// Coarse-to-fine ladder of exact roundings of a candidate.
struct RationalCandidate {
  std::vector<double> a0;
  std::vector<RoundingLevel> levels;
};

/// Nearest multiple of 10^-digits, ties away from zero.
Rational round_decimal(double value, int digits);

/// Roundings to 1, 2, ..., 6 decimal digits, so denominators divide 10, 100,
/// ..., 10^6, each clamped into `param_box`. A level equal to its
/// predecessor is dropped.
RationalCandidate rationalize(const std::vector<double>& a0, const Box& param_box,
                              const Underapprox* underapprox = nullptr);

/// The conditions of `loop` and `tmpl` with the parameters fixed to `a`.
/// The problems keep the universe but no longer mention the parameters.
std::vector<ConditionProblem> instantiate_conditions(const GuardedLoop& loop,
                                                     const TemplateSpec& tmpl,
                                                     const std::vector<Rational>& a);

struct Counterexample {
  std::string condition_id;
  int condition_index = 0;
  /// Names and values of the quantified variables.
  std::vector<std::string> names;
  std::vector<Rational> point;
  /// l at the point; positive.
  Rational violation;
};

struct FalsifyOptions {
  long long samples = 100000;
  uint64_t seed = 1;
  /// Up to this many sample pairs straddling the domain boundary are bisected.
  int boundary_pairs = 256;
  int bisection_steps = 24;
  /// Local ascent on l from this many of the highest inside samples.
  int ascent_starts = 16;
  int ascent_iters = 4000;
};

/// Checks every condition in exact arithmetic at Halton points of the
/// condition's quantified box, at the box corners, at the end points of a
/// float ascent on l and at bisected points near the boundary of the premise.
/// Returns the first violation found.
std::optional<Counterexample> falsify(const GuardedLoop& loop, const TemplateSpec& tmpl,
                                      const std::vector<Rational>& a,
                                      const FalsifyOptions& options = {});

/// Same check on one instantiated problem.
std::optional<Counterexample> falsify_condition(const ConditionProblem& cond,
                                                const FalsifyOptions& options);

struct SmtScript {
  std::string condition_id;
  int condition_index = 0;
  /// cond_<i>.smt2, or cond_<i>_<r>.smt2 when condition i has several
  /// conjuncts.
  std::string file_name;
  std::string text;
};

/// SMT-LIB numeral of an exact rational. Decimal fractions print as
/// (/ N 10^k).
std::string smt_numeral(const Rational& value);

/// SMT-LIB term of a polynomial.
std::string smt_term(const RatPolynomial& p);

/// One QF_NRA script per condition asserting box, premise and the negated
/// consequent. `unsat` means the condition holds.
std::vector<SmtScript> emit_smtlib(const GuardedLoop& loop, const TemplateSpec& tmpl,
                                   const std::vector<Rational>& a);

enum class ConditionVerdict { kFalsified, kSampleClean, kExternallyVerified, kExternalUnknown };
enum class OverallVerdict { kVerified, kCandidateOnly, kRefuted };

const char* to_string(ConditionVerdict verdict);
const char* to_string(OverallVerdict verdict);

struct ConditionCheck {
  std::string condition_id;
  ConditionVerdict verdict = ConditionVerdict::kSampleClean;
  std::optional<Counterexample> counterexample;
  /// First token printed by the external solver, or a failure description.
  std::string solver_answer;
  std::string smt_file;
};

struct Verdict {
  std::vector<ConditionCheck> conditions;
  OverallVerdict overall = OverallVerdict::kCandidateOnly;
  /// Index into the rounding ladder of the checked level; -1 when none.
  int level = -1;
};

/// Recomputes `overall` from the per-condition verdicts.
void finalize_verdict(Verdict& verdict);

struct ExternalOptions {
  /// Solver executable; empty falls back to SEMIALG_INV_SMT_SOLVER, and no
  /// solver leaves verdicts unchanged.
  std::string solver;
  double timeout_secs = 60;
  int threads = 1;
  /// Scripts are written here; empty uses a fresh temporary directory.
  std::string out_dir;
};

/// Resolved solver path, or empty.
std::string resolve_smt_solver(const std::string& configured);

/// Writes the scripts and runs the solver on each. `unsat` marks the
/// condition externally verified, `sat` falsified with the parsed model,
/// anything else external_unknown. Solver failures are recorded, never
/// thrown.
void verify_external(const std::vector<SmtScript>& scripts, const ExternalOptions& options,
                     Verdict& verdict);

struct PosteriorOptions {
  FalsifyOptions falsify;
  ExternalOptions external;
};

struct PosteriorResult {
  RationalCandidate candidate;
  Verdict verdict;
};

/// Falsifies the ladder coarse to fine and checks the first clean level
/// externally. When every level is falsified the verdict refers to the finest.
PosteriorResult posterior_check(const GuardedLoop& loop, const TemplateSpec& tmpl,
                                const std::vector<double>& a0, const PosteriorOptions& options,
                                const Underapprox* underapprox = nullptr);

}  // namespace semialg
