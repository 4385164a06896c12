#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "semialg/posterior.h"
#include "semialg/synthesis.h"

namespace semialg {

using Json = nlohmann::json;

enum class RunOutcome { kVerified, kCandidate, kNotFound, kRefuted, kError };

const char* to_string(RunOutcome outcome);

/// 0 verified or candidate, 1 not found, 2 refuted, 3 error.
int exit_code(RunOutcome outcome);

struct RunReport {
  /// Echo of the resolved configuration.
  Json config = Json::object();
  std::string program;
  std::string template_text;
  SynthesisReport synthesis;
  std::optional<PosteriorResult> posterior;
  RunOutcome outcome = RunOutcome::kNotFound;
  std::string error;
  double seconds = 0;
};

RunOutcome outcome_of(const SynthesisReport& synthesis, const std::optional<PosteriorResult>& post);

Json polynomial_to_json(const FloatPolynomial& p);
FloatPolynomial polynomial_from_json(const Json& j, const UniversePtr& universe);

Json box_to_json(const Box& box);
Box box_from_json(const Json& j);

Json to_json(const SynthesisReport& report);
Json to_json(const PosteriorResult& result);
/// Object keys are sorted, so dumps are stable across runs.
Json to_json(const RunReport& report);

struct ReplayResult {
  int degree = 0;
  std::optional<Candidate> candidate;
  /// Candidate stored in the report, if any.
  std::optional<std::vector<double>> recorded;
  bool matches = false;
};

Json to_json(const ExtractOptions& options);
ExtractOptions extract_options_from_json(const Json& j);

/// Rebuilds the underapproximation of the deciding degree from the p's of a
/// report and reruns extraction with the recorded options (config.extract)
/// and the degree's margin.
ReplayResult replay_extraction(const Json& report);

}  // namespace semialg
