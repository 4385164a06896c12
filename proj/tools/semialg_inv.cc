// Command-line front end.
//
//   semialg_inv run --corpus overview --max-degree 2
//   semialg_inv run --input loop.txt --template "x^2 + a*y^2 + b" --json
//   semialg_inv bench overview example22 L1 --timeout-secs 600
//   semialg_inv replay report.json
//
// Exit codes: 0 verified or candidate, 1 not found, 2 refuted, 3 error.

#include <unistd.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "semialg/errors.h"
#include "semialg/posterior.h"
#include "semialg/process.h"
#include "semialg/report.h"
#include "semialg/synthesis.h"

namespace {

using namespace semialg;

constexpr int kExitError = 3;

struct RunOptions {
  std::string input;
  std::string corpus;
  std::string template_text;
  std::string template_file;
  std::optional<int> auto_template;
  int max_degree = 3;
  double big_m = 10.0;
  std::string param_box;
  std::string var_box;
  uint64_t seed = 1;
  std::optional<double> margin;
  long long samples = 100000;
  std::string backend = "internal";
  std::string smt_out;
  std::string smt_solver;
  int threads = 1;
  double timeout_secs = 0;
  std::string out;
  bool json = false;
  int partition_cells = 1;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void add_run_flags(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--input", o.input, "Program source file");
  cmd->add_option("--corpus", o.corpus, "Built-in program name");
  cmd->add_option("--template", o.template_text, "Template conjuncts, e.g. \"x^2 + a*y^2 + b\"");
  cmd->add_option("--template-file", o.template_file, "File holding the template");
  cmd->add_option("--auto-template", o.auto_template,
                  "Use all monomials of the program variables up to this degree");
  cmd->add_option("--max-degree", o.max_degree, "Highest relaxation degree")->capture_default_str();
  cmd->add_option("--big-m", o.big_m, "Lower clamp M of the representing functions")
      ->capture_default_str();
  cmd->add_option("--param-box", o.param_box, "Parameter box, e.g. \"[-5,5] x [-5,5]\"");
  cmd->add_option("--var-box", o.var_box, "Program variable box replacing the program's");
  cmd->add_option("--seed", o.seed, "Seed of extraction and sampling")->capture_default_str();
  cmd->add_option("--margin", o.margin, "Acceptance margin delta (default derived per degree)");
  cmd->add_option("--samples", o.samples, "Falsification samples per condition")
      ->capture_default_str();
  cmd->add_option("--backend", o.backend, "internal or sdpa:<dir>")->capture_default_str();
  cmd->add_option("--smt-out", o.smt_out, "Directory for the SMT-LIB scripts");
  cmd->add_option("--smt-solver", o.smt_solver,
                  "SMT solver executable (default $SEMIALG_INV_SMT_SOLVER)");
  cmd->add_option("--threads", o.threads, "Worker threads")->capture_default_str();
  cmd->add_option("--timeout-secs", o.timeout_secs, "Time limit per degree (0 = none)")
      ->capture_default_str();
  cmd->add_option("--out", o.out, "Write the JSON report to this file");
  cmd->add_flag("--json", o.json, "Print the JSON report on stdout");
  cmd->add_option("--partition-cells", o.partition_cells,
                  "Split each parameter axis into this many cells")
      ->capture_default_str();
}

struct Problem {
  std::string name;
  GuardedLoop loop;
  TemplateSpec tmpl;
};

Problem load_problem(const RunOptions& o) {
  if (o.input.empty() == o.corpus.empty()) throw ConfigError("give exactly one of --input, --corpus");
  const int template_sources = !o.template_text.empty() + !o.template_file.empty() +
                               o.auto_template.has_value();
  if (template_sources > 1) {
    throw ConfigError("give at most one of --template, --template-file, --auto-template");
  }
  Problem p;
  std::optional<TemplateSpec> corpus_template;
  if (!o.corpus.empty()) {
    auto [loop, tmpl] = corpus(o.corpus);
    p.name = o.corpus;
    p.loop = std::move(loop);
    corpus_template = std::move(tmpl);
  } else {
    p.name = o.input;
    p.loop = parse_program(read_file(o.input));
  }
  if (!o.var_box.empty()) {
    Box box = parse_box(o.var_box, p.loop.num_vars());
    if (static_cast<int>(box.size()) != p.loop.num_vars()) {
      throw ConfigError("--var-box needs one interval per program variable");
    }
    p.loop.var_box = std::move(box);
  }
  if (!o.template_text.empty()) {
    p.tmpl = parse_template(o.template_text, p.loop);
  } else if (!o.template_file.empty()) {
    p.tmpl = parse_template(read_file(o.template_file), p.loop);
  } else if (o.auto_template) {
    if (*o.auto_template < 0) throw ConfigError("--auto-template needs a non-negative degree");
    p.tmpl = auto_template(p.loop, *o.auto_template);
  } else if (corpus_template) {
    p.tmpl = std::move(*corpus_template);
  } else {
    throw ConfigError("--input needs --template, --template-file or --auto-template");
  }
  if (!o.param_box.empty()) {
    Box box = parse_box(o.param_box, p.tmpl.num_params());
    if (static_cast<int>(box.size()) != p.tmpl.num_params()) {
      throw ConfigError("--param-box needs one interval per parameter");
    }
    p.tmpl.param_box = std::move(box);
  }
  for (const auto& d : validate(p.loop, p.tmpl)) {
    if (d.severity == Diagnostic::Severity::kError) throw ConfigError(d.message);
    std::cerr << "warning: " << d.message << "\n";
  }
  return p;
}

SynthesisSettings make_settings(const RunOptions& o) {
  if (o.max_degree < 1) throw ConfigError("--max-degree must be at least 1");
  if (!(o.big_m > 0)) throw ConfigError("--big-m must be positive");
  if (o.margin && !(*o.margin > 0)) throw ConfigError("--margin must be positive");
  if (o.samples < 1) throw ConfigError("--samples must be at least 1");
  if (o.threads < 1) throw ConfigError("--threads must be at least 1");
  if (o.timeout_secs < 0) throw ConfigError("--timeout-secs must be non-negative");
  if (o.partition_cells < 1) throw ConfigError("--partition-cells must be at least 1");
  SynthesisSettings s;
  s.max_degree = o.max_degree;
  s.conditions.big_m = rational_from_double(o.big_m);
  s.margin = o.margin;
  s.threads = o.threads;
  s.degree_time_limit = o.timeout_secs;
  s.partition_cells = o.partition_cells;
  s.extract.seed = o.seed;
  s.extract.threads = o.threads;
  if (o.backend == "internal") {
    s.solver.backend = Backend::kInternal;
  } else if (o.backend.rfind("sdpa:", 0) == 0 && o.backend.size() > 5) {
    s.solver.backend = Backend::kFileExchange;
    s.solver.exchange_dir = o.backend.substr(5);
  } else {
    throw ConfigError("--backend must be 'internal' or 'sdpa:<dir>'");
  }
  return s;
}

Json config_echo(const RunOptions& o, const Problem& p, const SynthesisSettings& s) {
  Json j = {{"program", p.name},
            {"input", o.input},
            {"corpus", o.corpus},
            {"template", template_to_string(p.tmpl)},
            {"param_box", box_to_json(p.tmpl.param_box)},
            {"var_box", box_to_json(p.loop.var_box)},
            {"max_degree", s.max_degree},
            {"big_m", o.big_m},
            {"seed", o.seed},
            {"margin", o.margin ? Json(*o.margin) : Json(nullptr)},
            {"samples", o.samples},
            {"backend", o.backend},
            {"smt_out", o.smt_out},
            {"smt_solver", resolve_smt_solver(o.smt_solver)},
            {"threads", o.threads},
            {"timeout_secs", o.timeout_secs},
            {"partition_cells", o.partition_cells},
            {"extract", to_json(s.extract)},
            {"solver",
             {{"feas_tol", s.solver.feas_tol},
              {"gap_tol", s.solver.gap_tol},
              {"eig_tol", s.solver.eig_tol},
              {"max_iters", s.solver.max_iters}}}};
  return j;
}

std::string join_values(const std::vector<std::string>& names, const std::vector<double>& v) {
  std::ostringstream s;
  s << std::setprecision(10);
  for (size_t k = 0; k < v.size(); ++k) s << (k ? ", " : "") << names[k] << " = " << v[k];
  return s.str();
}

void print_summary(const RunReport& r, std::ostream& out) {
  const auto& syn = r.synthesis;
  out << "program: " << r.program << "\n";
  out << "template: " << r.template_text << "  over " << box_to_string(syn.param_box) << "\n";
  for (const auto& d : syn.degrees) {
    int solved = 0;
    for (const auto& c : d.conditions) solved += c.solved;
    out << "degree " << d.degree << ": " << solved << "/" << d.conditions.size()
        << " relaxations solved, delta " << d.delta;
    if (!d.note.empty()) out << ", " << d.note;
    out << " (" << std::fixed << std::setprecision(1) << d.seconds << " s)\n";
    out.unsetf(std::ios::fixed);
    out << std::setprecision(6);
    for (const auto& c : d.conditions) {
      out << "  " << c.id;
      if (c.cell_box != syn.param_box) out << " cell " << c.cell;
      out << " " << to_string(c.kind) << ": " << to_string(c.status);
      if (!c.solved && !c.message.empty()) out << " (" << c.message << ")";
      out << "\n    p = " << c.p.to_string() << "\n";
    }
  }
  if (syn.candidate) {
    out << "candidate: " << join_values(syn.param_names, syn.candidate->a0) << " (margin "
        << syn.candidate->margin << ", degree " << syn.found_degree << ")\n";
  } else {
    out << "candidate: none\n";
  }
  if (r.posterior) {
    const auto& v = r.posterior->verdict;
    if (v.level >= 0) {
      const auto& lv = r.posterior->candidate.levels[v.level];
      out << "rounded:";
      for (size_t k = 0; k < lv.values.size(); ++k) {
        out << (k ? ", " : " ") << syn.param_names[k] << " = " << rational_to_string(lv.values[k]);
      }
      out << "\n";
    }
    for (const auto& c : v.conditions) {
      out << "  " << c.condition_id << ": " << to_string(c.verdict);
      if (c.counterexample) {
        out << " at";
        for (size_t k = 0; k < c.counterexample->names.size(); ++k) {
          out << " " << c.counterexample->names[k] << " = "
              << rational_to_double(c.counterexample->point[k]);
        }
      }
      out << "\n";
    }
    out << "posterior: " << to_string(v.overall) << "\n";
  }
  out << "outcome: " << to_string(r.outcome) << "\n";
}

void emit(const RunReport& report, const RunOptions& o) {
  const Json j = to_json(report);
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) throw ConfigError("cannot write '" + o.out + "'");
    f << j.dump(2) << "\n";
  }
  if (o.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    print_summary(report, std::cout);
  }
}

int run_command(const RunOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  try {
    const Problem p = load_problem(o);
    const SynthesisSettings s = make_settings(o);
    report.program = p.name;
    report.template_text = template_to_string(p.tmpl);
    report.config = config_echo(o, p, s);
    report.synthesis = escalate(p.loop, p.tmpl, s);
    if (report.synthesis.candidate) {
      PosteriorOptions po;
      po.falsify.samples = o.samples;
      po.falsify.seed = o.seed;
      po.external.solver = o.smt_solver;
      po.external.out_dir = o.smt_out;
      po.external.threads = o.threads;
      if (o.timeout_secs > 0) po.external.timeout_secs = o.timeout_secs;
      const DegreeRecord& found = report.synthesis.degrees.back();
      const Underapprox u = underapprox_from(found, p.tmpl.params, p.tmpl.param_box);
      report.posterior =
          posterior_check(p.loop, p.tmpl, report.synthesis.candidate->a0, po, &u);
    }
    report.outcome = outcome_of(report.synthesis, report.posterior);
  } catch (const std::exception& e) {
    report.outcome = RunOutcome::kError;
    report.error = e.what();
    std::cerr << "error: " << e.what() << "\n";
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (report.outcome == RunOutcome::kError && !o.json && o.out.empty()) return kExitError;
  try {
    emit(report, o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return exit_code(report.outcome);
}

std::string self_path(const char* argv0) {
  std::vector<char> buf(4096);
  const ssize_t n = readlink("/proc/self/exe", buf.data(), buf.size() - 1);
  if (n > 0) return std::string(buf.data(), static_cast<size_t>(n));
  return argv0;
}

struct BenchOptions {
  std::vector<std::string> names;
  double timeout_secs = 600;
  int max_degree = 3;
  uint64_t seed = 1;
  std::string smt_solver;
  std::string out;
  bool json = false;
};

int bench_command(const BenchOptions& o, const std::string& self) {
  std::vector<std::string> names = o.names.empty() ? corpus_names() : o.names;
  const auto known = corpus_names();
  Json rows = Json::array();
  for (const auto& name : names) {
    Json row = {{"program", name}};
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      row["status"] = "error";
      row["error"] = "unknown corpus program";
      rows.push_back(row);
      continue;
    }
    std::vector<std::string> args = {self, "run", "--corpus", name, "--json",
                                     "--max-degree", std::to_string(o.max_degree),
                                     "--seed", std::to_string(o.seed)};
    if (!o.smt_solver.empty()) {
      args.push_back("--smt-solver");
      args.push_back(o.smt_solver);
    }
    const auto start = std::chrono::steady_clock::now();
    const ProcessResult res = run_process(args, o.timeout_secs);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    row["seconds"] = secs;
    if (res.timed_out) {
      row["status"] = "timeout";
      row["found"] = false;
    } else {
      try {
        const Json rep = Json::parse(res.output);
        const Json& syn = rep.at("synthesis");
        row["status"] = rep.at("outcome");
        row["found"] = !syn.at("candidate").is_null();
        row["degree"] = syn.at("found_degree");
        row["candidate"] = syn.at("candidate").is_null() ? Json(nullptr) : syn["candidate"]["a0"];
        row["verdict"] = rep.at("posterior").is_null() ? Json(nullptr)
                                                        : rep["posterior"]["verdict"]["overall"];
        row["exit_code"] = res.exit_code;
      } catch (const std::exception&) {
        row["status"] = "error";
        row["found"] = false;
        row["exit_code"] = res.exit_code;
      }
    }
    rows.push_back(row);
    if (!o.json) {
      std::cerr << name << ": " << row["status"].get<std::string>() << " (" << std::fixed
                << std::setprecision(1) << secs << " s)\n";
    }
  }
  const Json out = {{"timeout_secs", o.timeout_secs}, {"max_degree", o.max_degree}, {"rows", rows}};
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) {
      std::cerr << "error: cannot write '" << o.out << "'\n";
      return kExitError;
    }
    f << out.dump(2) << "\n";
  }
  if (o.json) {
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  std::printf("%-18s %-6s %-6s %-10s %s\n", "program", "found", "degree", "time[s]", "status");
  for (const auto& r : rows) {
    const bool found = r.value("found", false);
    std::printf("%-18s %-6s %-6s %-10.1f %s\n", r["program"].get<std::string>().c_str(),
                found ? "yes" : "no",
                found ? std::to_string(r["degree"].get<int>()).c_str() : "-",
                r.value("seconds", 0.0), r["status"].get<std::string>().c_str());
  }
  return 0;
}

int replay_command(const std::string& path, bool json) {
  try {
    const Json report = Json::parse(read_file(path));
    const ReplayResult r = replay_extraction(report);
    if (json) {
      Json out = {{"degree", r.degree},
                  {"matches", r.matches},
                  {"candidate", r.candidate ? Json(r.candidate->a0) : Json(nullptr)},
                  {"recorded", r.recorded ? Json(*r.recorded) : Json(nullptr)}};
      std::cout << out.dump(2) << "\n";
    } else {
      std::cout << "degree: " << r.degree << "\n";
      std::cout << std::setprecision(17);
      std::cout << "replayed:";
      if (r.candidate) {
        for (double v : r.candidate->a0) std::cout << " " << v;
      } else {
        std::cout << " none";
      }
      std::cout << "\nrecorded:";
      if (r.recorded) {
        for (double v : *r.recorded) std::cout << " " << v;
      } else {
        std::cout << " none";
      }
      std::cout << "\n" << (r.matches ? "match" : "mismatch") << "\n";
    }
    return r.matches ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semialgebraic invariant synthesis by SOS underapproximation"};
  app.require_subcommand(1);

  RunOptions run;
  CLI::App* run_cmd = app.add_subcommand("run", "Synthesize an invariant for one program");
  add_run_flags(run_cmd, run);

  BenchOptions bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Run corpus programs with a timeout each");
  bench_cmd->add_option("names", bench.names, "Corpus programs (default: all)");
  bench_cmd->add_option("--timeout-secs", bench.timeout_secs, "Timeout per program")
      ->capture_default_str();
  bench_cmd->add_option("--max-degree", bench.max_degree, "Highest relaxation degree")
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "Seed")->capture_default_str();
  bench_cmd->add_option("--smt-solver", bench.smt_solver, "SMT solver executable");
  bench_cmd->add_option("--out", bench.out, "Write the JSON table to this file");
  bench_cmd->add_flag("--json", bench.json, "Print the JSON table on stdout");

  std::string replay_path;
  bool replay_json = false;
  CLI::App* replay_cmd = app.add_subcommand("replay", "Rerun extraction from a JSON report");
  replay_cmd->add_option("report", replay_path, "Report written by run --out")->required();
  replay_cmd->add_flag("--json", replay_json, "Print JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitError;
  }
  if (*run_cmd) return run_command(run);
  if (*bench_cmd) return bench_command(bench, self_path(argv[0]));
  if (*replay_cmd) return replay_command(replay_path, replay_json);
  return kExitError;
}
