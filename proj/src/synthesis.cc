#include "semialg/synthesis.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "semialg/errors.h"

namespace semialg {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <typename F>
void parallel_for(size_t n, int threads, F&& body) {
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next++; i < n; i = next++) body(i);
  };
  const int count = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

}  // namespace

ConditionRecord solve_condition(const ConditionProblem& cond, const RelaxationOptions& relaxation,
                                const SolverSettings& solver, const UniversePtr& params) {
  const auto start = std::chrono::steady_clock::now();
  ConditionRecord rec;
  rec.id = cond.id();
  rec.kind = cond.kind;
  rec.cell_box = cond.param_box;
  rec.implication = implication_string(cond);
  rec.domain_box = cond.domain.box;
  rec.p = FloatPolynomial(params);
  const SosProgram sos = build_relaxation(cond, relaxation);
  const SdpProblem prob = compile(sos);
  rec.rows = prob.num_rows;
  rec.free_vars = prob.num_free();
  for (const auto& b : prob.blocks) rec.block_dims.push_back(b.dim);
  const SdpSolution sol = solve(prob, solver);
  rec.status = sol.status;
  rec.message = sol.message;
  rec.objective = sol.primal_objective;
  rec.primal_residual = sol.primal_residual;
  rec.dual_residual = sol.dual_residual;
  rec.relative_gap = sol.relative_gap;
  rec.min_eigenvalue = sol.min_eigenvalue;
  rec.iterations = sol.iterations;
  if (sol.usable()) {
    rec.certificate = certify_identity(sol, sos, 1e-6, solver.eig_tol);
    rec.p = recover_p(sol, sos).rebase(params);
    rec.solved = !rec.certificate.flagged;
    if (!rec.solved) rec.message += "; certificate flagged";
  }
  rec.seconds = seconds_since(start);
  return rec;
}

Underapprox underapprox_from(const DegreeRecord& record, const UniversePtr& params,
                             const Box& param_box) {
  Underapprox u;
  u.degree = record.degree;
  u.params = params;
  u.param_box = param_box;
  for (const auto& c : record.conditions) {
    auto it = std::find_if(u.entries.begin(), u.entries.end(),
                           [&](const UnderapproxEntry& e) { return e.condition_id == c.id; });
    if (it == u.entries.end()) {
      u.entries.push_back({c.id, {}});
      it = u.entries.end() - 1;
    }
    it->pieces.push_back({c.cell_box, c.p});
  }
  return u;
}

SynthesisReport escalate(const GuardedLoop& loop, const TemplateSpec& tmpl,
                         const SynthesisSettings& settings) {
  if (settings.max_degree < 1) throw ConfigError("max degree must be at least 1");
  if (settings.min_degree < 1 || settings.min_degree > settings.max_degree) {
    throw ConfigError("min degree must lie in [1, max degree]");
  }
  if (settings.partition_cells < 1) throw ConfigError("partition cells must be positive");
  const auto start = std::chrono::steady_clock::now();
  SynthesisReport report;
  report.param_names = tmpl.params->names();
  report.param_box = tmpl.param_box;

  const ConditionSet cs = build_conditions(loop, tmpl, settings.conditions);
  report.num_conditions = static_cast<int>(cs.problems.size());
  const std::vector<Box> cells = partition_box(tmpl.param_box, settings.partition_cells);
  struct Job {
    const ConditionProblem* cond;
    int cell;
  };
  std::vector<Job> jobs;
  for (const auto& cond : cs.problems) {
    for (size_t c = 0; c < cells.size(); ++c) jobs.push_back({&cond, static_cast<int>(c)});
  }

  for (int d = settings.min_degree; d <= settings.max_degree; ++d) {
    const auto dstart = std::chrono::steady_clock::now();
    DegreeRecord rec;
    rec.degree = d;
    rec.conditions.resize(jobs.size());
    RelaxationOptions ro = settings.relaxation;
    ro.degree = d;
    std::atomic<bool> sizing_failed{false};
    parallel_for(jobs.size(), settings.threads, [&](size_t i) {
      const Job& job = jobs[i];
      SolverSettings ss = settings.solver;
      if (settings.degree_time_limit > 0) {
        const double left = settings.degree_time_limit - seconds_since(dstart);
        if (left <= 0) {
          ConditionRecord& r = rec.conditions[i];
          r.id = job.cond->id();
          r.kind = job.cond->kind;
          r.cell = job.cell;
          r.cell_box = cells[job.cell];
          r.p = FloatPolynomial(tmpl.params);
          r.message = "degree time limit reached before solving";
          return;
        }
        ss.time_limit = ss.time_limit > 0 ? std::min(ss.time_limit, left) : left;
      }
      try {
        const ConditionProblem cell_cond =
            cells.size() == 1 ? *job.cond : restrict_params(*job.cond, cells[job.cell]);
        rec.conditions[i] = solve_condition(cell_cond, ro, ss, tmpl.params);
      } catch (const SizingError& e) {
        sizing_failed = true;
        rec.conditions[i].id = job.cond->id();
        rec.conditions[i].message = e.what();
        rec.conditions[i].p = FloatPolynomial(tmpl.params);
      }
      rec.conditions[i].cell = job.cell;
      rec.conditions[i].cell_box = cells[job.cell];
    });
    rec.all_solved = std::all_of(rec.conditions.begin(), rec.conditions.end(),
                                 [](const ConditionRecord& c) { return c.solved; });
    double bound = 0;
    for (const auto& c : rec.conditions) bound = std::max(bound, c.certificate.soundness_bound);
    rec.delta = settings.margin ? *settings.margin : 1e-6 + 10.0 * bound;
    if (sizing_failed) {
      rec.note = "relaxation could not be sized";
    } else if (!rec.all_solved) {
      rec.note = "some conditions were not solved";
    } else {
      ExtractOptions eo = settings.extract;
      eo.delta = rec.delta;
      eo.threads = std::max(eo.threads, settings.threads);
      rec.candidate = find_assignment(underapprox_from(rec, tmpl.params, tmpl.param_box), eo);
      if (!rec.candidate) rec.note = "no parameter reaches the margin";
    }
    rec.seconds = seconds_since(dstart);
    const bool found = rec.candidate.has_value();
    report.degrees.push_back(std::move(rec));
    if (found) {
      report.candidate = report.degrees.back().candidate;
      report.found_degree = d;
      break;
    }
  }
  report.seconds = seconds_since(start);
  return report;
}

}  // namespace semialg
