#pragma once

#include <optional>
#include <string>
#include <vector>

#include "semialg/conditions.h"
#include "semialg/extract.h"
#include "semialg/sdp.h"
#include "semialg/sos.h"

namespace semialg {

struct SynthesisSettings {
  int min_degree = 1;
  int max_degree = 3;
  ConditionOptions conditions;
  RelaxationOptions relaxation;
  SolverSettings solver;
  ExtractOptions extract;
  /// Fixed acceptance margin; unset uses 1e-6 + 10 * (largest soundness
  /// bound of the degree).
  std::optional<double> margin;
  /// Parameter cells per axis; each condition is solved once per cell.
  int partition_cells = 1;
  int threads = 1;
  /// Wall-clock budget per degree in seconds; <= 0 means none.
  double degree_time_limit = 0;
};

struct ConditionRecord {
  std::string id;
  ConditionKind kind = ConditionKind::kInitiation;
  int cell = 0;
  Box cell_box;
  std::string implication;
  Box domain_box;
  int rows = 0;
  int free_vars = 0;
  std::vector<int> block_dims;
  SdpStatus status = SdpStatus::kNumericalFailure;
  std::string message;
  double objective = 0;
  double primal_residual = 0;
  double dual_residual = 0;
  double relative_gap = 0;
  double min_eigenvalue = 0;
  int iterations = 0;
  double seconds = 0;
  CertificateReport certificate;
  bool solved = false;
  /// p over the parameter universe, original coordinates.
  FloatPolynomial p;
};

struct DegreeRecord {
  int degree = 0;
  std::vector<ConditionRecord> conditions;
  bool all_solved = false;
  double delta = 0;
  std::optional<Candidate> candidate;
  /// Set when the degree could not be finished.
  std::string note;
  double seconds = 0;
};

struct SynthesisReport {
  std::vector<std::string> param_names;
  Box param_box;
  int num_conditions = 0;
  std::vector<DegreeRecord> degrees;
  std::optional<Candidate> candidate;
  int found_degree = 0;
  double seconds = 0;
};

/// Underapproximation of one degree from its solved condition records.
Underapprox underapprox_from(const DegreeRecord& record, const UniversePtr& params,
                             const Box& param_box);

/// Solves every condition at degrees min_degree..max_degree and stops at the
/// first degree that yields a candidate.
SynthesisReport escalate(const GuardedLoop& loop, const TemplateSpec& tmpl,
                         const SynthesisSettings& settings);

/// Solves one condition at one degree.
ConditionRecord solve_condition(const ConditionProblem& cond, const RelaxationOptions& relaxation,
                                const SolverSettings& solver, const UniversePtr& params);

}  // namespace semialg
