#pragma once

#include <string>
#include <vector>

#include "semialg/poly.h"
#include "semialg/program.h"

namespace semialg {

/// {v : g(v) <= 0 for every g} intersected with a box on `box_vars`.
struct SemialgSet {
  UniversePtr universe;
  std::vector<RatPolynomial> constraints;
  std::vector<int> box_vars;
  Box box;

  /// Constraints plus the box rows (lo - v) <= 0 and (v - hi) <= 0.
  std::vector<RatPolynomial> all_constraints() const;
  /// True when `point` (full universe) satisfies every constraint.
  bool contains(const std::vector<Rational>& point) const;
};

enum class ConditionKind { kInitiation, kConsecution, kPostcondition };

const char* to_string(ConditionKind kind);

/// One obligation sup_{x in K(a)} l(a, x) <= 0 together with its clamp M.
/// The universe is params, then program variables, then disturbances.
struct ConditionProblem {
  int index = 0;
  int sub_index = 0;
  ConditionKind kind = ConditionKind::kInitiation;
  UniversePtr universe;
  int num_params = 0;
  int num_vars = 0;
  int num_disturbances = 0;
  /// Universe indices of the parameters and of the quantified variables.
  std::vector<int> params;
  std::vector<int> quantified;
  RatPolynomial objective;
  SemialgSet domain;
  Box param_box;
  /// Quantified-variable box before tightening.
  Box original_box;
  Rational big_m = 10;

  std::string id() const;
};

struct ConditionSet {
  UniversePtr universe;
  int num_params = 0;
  std::vector<ConditionProblem> problems;
};

struct ConditionOptions {
  Rational big_m = 10;
  /// Replace C_x by outer bounds of each domain proved with interval
  /// branch and prune. The domain as a set is unchanged.
  bool tighten = true;
};

/// Joint universe params ++ program vars ++ disturbances.
UniversePtr joint_universe(const GuardedLoop& loop, const TemplateSpec& tmpl);

ConditionSet build_conditions(const GuardedLoop& loop, const TemplateSpec& tmpl,
                              const ConditionOptions& options = {});

/// Outer box of the quantified part of `domain`, where the parameters range
/// over `param_box`. Returns an empty box when the domain is proved empty.
Box tighten_domain_box(const SemialgSet& domain, const std::vector<int>& param_indices,
                       const Box& param_box);

/// Brute-force phi(a) = max(-M, sup of l over K(a)): a grid with `density`
/// points per quantified coordinate over the domain box, then a compass
/// search inside K(a) from the best grid points. A lower estimate; meant for
/// tests.
double phi_oracle(const ConditionProblem& cond, const std::vector<double>& a, int density);

/// "(g1 <= 0) && ... ==> (l <= 0)".
std::string implication_string(const ConditionProblem& cond);

}  // namespace semialg
