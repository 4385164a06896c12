#include "semialg/report.h"

#include <algorithm>
#include <cmath>

#include "semialg/errors.h"

namespace semialg {

namespace {

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json rationals_to_json(const std::vector<Rational>& values) {
  Json out = Json::array();
  for (const auto& v : values) out.push_back(rational_to_string(v));
  return out;
}

Json candidate_to_json(const std::optional<Candidate>& c) {
  if (!c) return nullptr;
  return {{"a0", c->a0},
          {"margin", finite_or_null(c->margin)},
          {"trace",
           {{"method", c->trace.method},
            {"start_index", c->trace.start_index},
            {"starts_run", c->trace.starts_run},
            {"iterations", c->trace.iterations},
            {"grid_points", c->trace.grid_points}}}};
}

Json certificate_to_json(const CertificateReport& c) {
  Json ids = Json::array();
  for (const auto& r : c.identities) {
    ids.push_back({{"label", r.label},
                   {"max_abs_residual", finite_or_null(r.max_abs_residual)},
                   {"relative_residual", finite_or_null(r.relative_residual)},
                   {"lhs_max_coef", finite_or_null(r.lhs_max_coef)}});
  }
  return {{"identities", ids},
          {"max_relative_residual", finite_or_null(c.max_relative_residual)},
          {"min_eigenvalue", finite_or_null(c.min_eigenvalue)},
          {"soundness_bound", finite_or_null(c.soundness_bound)},
          {"flagged", c.flagged}};
}

Json condition_to_json(const ConditionRecord& c) {
  return {{"id", c.id},
          {"kind", to_string(c.kind)},
          {"cell", c.cell},
          {"cell_box", box_to_json(c.cell_box)},
          {"implication", c.implication},
          {"domain_box", box_to_json(c.domain_box)},
          {"rows", c.rows},
          {"free_vars", c.free_vars},
          {"block_dims", c.block_dims},
          {"status", to_string(c.status)},
          {"message", c.message},
          {"objective", finite_or_null(c.objective)},
          {"primal_residual", finite_or_null(c.primal_residual)},
          {"dual_residual", finite_or_null(c.dual_residual)},
          {"relative_gap", finite_or_null(c.relative_gap)},
          {"min_eigenvalue", finite_or_null(c.min_eigenvalue)},
          {"iterations", c.iterations},
          {"seconds", c.seconds},
          {"certificate", certificate_to_json(c.certificate)},
          {"solved", c.solved},
          {"p", polynomial_to_json(c.p)}};
}

Json counterexample_to_json(const std::optional<Counterexample>& cx) {
  if (!cx) return nullptr;
  return {{"condition_id", cx->condition_id},
          {"names", cx->names},
          {"point", rationals_to_json(cx->point)},
          {"violation", rational_to_string(cx->violation)}};
}

}  // namespace

const char* to_string(RunOutcome outcome) {
  switch (outcome) {
    case RunOutcome::kVerified: return "verified";
    case RunOutcome::kCandidate: return "candidate";
    case RunOutcome::kNotFound: return "not_found";
    case RunOutcome::kRefuted: return "refuted";
    case RunOutcome::kError: return "error";
  }
  return "error";
}

int exit_code(RunOutcome outcome) {
  switch (outcome) {
    case RunOutcome::kVerified:
    case RunOutcome::kCandidate: return 0;
    case RunOutcome::kNotFound: return 1;
    case RunOutcome::kRefuted: return 2;
    case RunOutcome::kError: return 3;
  }
  return 3;
}

RunOutcome outcome_of(const SynthesisReport& synthesis, const std::optional<PosteriorResult>& post) {
  if (!synthesis.candidate) return RunOutcome::kNotFound;
  if (!post) return RunOutcome::kCandidate;
  switch (post->verdict.overall) {
    case OverallVerdict::kVerified: return RunOutcome::kVerified;
    case OverallVerdict::kCandidateOnly: return RunOutcome::kCandidate;
    case OverallVerdict::kRefuted: return RunOutcome::kRefuted;
  }
  return RunOutcome::kError;
}

Json polynomial_to_json(const FloatPolynomial& p) {
  Json terms = Json::array();
  for (const auto& [mono, c] : p.terms()) {
    terms.push_back({{"exponents", mono.exponents()}, {"coef", c}});
  }
  return {{"text", p.to_string()}, {"terms", terms}};
}

FloatPolynomial polynomial_from_json(const Json& j, const UniversePtr& universe) {
  FloatPolynomial p(universe);
  for (const auto& t : j.at("terms")) {
    std::vector<int> e = t.at("exponents").get<std::vector<int>>();
    if (static_cast<int>(e.size()) != universe->size()) {
      throw UsageError("monomial length does not match the parameter count");
    }
    p.add_term(Monomial(std::move(e)), t.at("coef").get<double>());
  }
  return p;
}

Json box_to_json(const Box& box) {
  Json out = Json::array();
  for (const auto& iv : box) out.push_back({rational_to_string(iv.lo), rational_to_string(iv.hi)});
  return out;
}

Box box_from_json(const Json& j) {
  Box box;
  for (const auto& iv : j) {
    box.push_back({parse_rational(iv.at(0).get<std::string>()),
                   parse_rational(iv.at(1).get<std::string>())});
  }
  return box;
}

Json to_json(const SynthesisReport& report) {
  Json degrees = Json::array();
  for (const auto& d : report.degrees) {
    Json conds = Json::array();
    for (const auto& c : d.conditions) conds.push_back(condition_to_json(c));
    degrees.push_back({{"degree", d.degree},
                       {"conditions", conds},
                       {"all_solved", d.all_solved},
                       {"delta", finite_or_null(d.delta)},
                       {"candidate", candidate_to_json(d.candidate)},
                       {"note", d.note},
                       {"seconds", d.seconds}});
  }
  return {{"param_names", report.param_names},
          {"param_box", box_to_json(report.param_box)},
          {"num_conditions", report.num_conditions},
          {"degrees", degrees},
          {"candidate", candidate_to_json(report.candidate)},
          {"found_degree", report.found_degree},
          {"seconds", report.seconds}};
}

Json to_json(const PosteriorResult& result) {
  Json levels = Json::array();
  for (const auto& l : result.candidate.levels) {
    levels.push_back({{"denominator_cap", l.denominator_cap},
                      {"values", rationals_to_json(l.values)},
                      {"margin", l.margin ? finite_or_null(*l.margin) : Json(nullptr)}});
  }
  Json conds = Json::array();
  for (const auto& c : result.verdict.conditions) {
    conds.push_back({{"id", c.condition_id},
                     {"verdict", to_string(c.verdict)},
                     {"counterexample", counterexample_to_json(c.counterexample)},
                     {"solver_answer", c.solver_answer},
                     {"smt_file", c.smt_file}});
  }
  return {{"a0", result.candidate.a0},
          {"levels", levels},
          {"verdict",
           {{"overall", to_string(result.verdict.overall)},
            {"level", result.verdict.level},
            {"conditions", conds}}}};
}

Json to_json(const RunReport& report) {
  return {{"config", report.config},
          {"program", report.program},
          {"template", report.template_text},
          {"synthesis", to_json(report.synthesis)},
          {"posterior", report.posterior ? to_json(*report.posterior) : Json(nullptr)},
          {"outcome", to_string(report.outcome)},
          {"exit_code", exit_code(report.outcome)},
          {"error", report.error},
          {"seconds", report.seconds}};
}

Json to_json(const ExtractOptions& o) {
  return {{"seed", o.seed},
          {"starts", o.starts},
          {"delta", o.delta},
          {"max_simplex_iters", o.max_simplex_iters},
          {"max_grid_points", o.max_grid_points},
          {"threads", o.threads}};
}

ExtractOptions extract_options_from_json(const Json& j) {
  ExtractOptions o;
  o.seed = j.value("seed", o.seed);
  o.starts = j.value("starts", o.starts);
  o.delta = j.value("delta", o.delta);
  o.max_simplex_iters = j.value("max_simplex_iters", o.max_simplex_iters);
  o.max_grid_points = j.value("max_grid_points", o.max_grid_points);
  o.threads = j.value("threads", o.threads);
  return o;
}

ReplayResult replay_extraction(const Json& report) {
  const Json& syn = report.at("synthesis");
  const UniversePtr params = make_universe(syn.at("param_names").get<std::vector<std::string>>());
  const Box param_box = box_from_json(syn.at("param_box"));
  ExtractOptions eo;
  if (report.contains("config") && report.at("config").contains("extract")) {
    eo = extract_options_from_json(report.at("config").at("extract"));
  }
  ReplayResult out;
  if (!syn.at("candidate").is_null()) {
    out.recorded = syn.at("candidate").at("a0").get<std::vector<double>>();
  }
  const Json* chosen = nullptr;
  for (const auto& d : syn.at("degrees")) {
    if (!d.at("all_solved").get<bool>()) continue;
    chosen = &d;
    if (!d.at("candidate").is_null()) break;
  }
  if (chosen == nullptr) {
    out.matches = !out.recorded;
    return out;
  }
  const Json& d = *chosen;
  out.degree = d.at("degree").get<int>();
  if (!d.at("delta").is_null()) eo.delta = d.at("delta").get<double>();
  Underapprox u;
  u.degree = out.degree;
  u.params = params;
  u.param_box = param_box;
  for (const auto& c : d.at("conditions")) {
    const std::string id = c.at("id").get<std::string>();
    auto it = std::find_if(u.entries.begin(), u.entries.end(),
                           [&](const UnderapproxEntry& e) { return e.condition_id == id; });
    if (it == u.entries.end()) {
      u.entries.push_back({id, {}});
      it = u.entries.end() - 1;
    }
    it->pieces.push_back({box_from_json(c.at("cell_box")), polynomial_from_json(c.at("p"), params)});
  }
  out.candidate = find_assignment(u, eo);
  out.matches = out.candidate ? (out.recorded && *out.recorded == out.candidate->a0)
                              : !out.recorded;
  return out;
}

}  // namespace semialg
