#include "semialg/posterior.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "semialg/errors.h"
#include "semialg/process.h"
#include "semialg/smtlib.h"

namespace semialg {

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

// Radical inverse of k in base b: the base-b digits of k mirrored about the
// radix point.
Rational halton(unsigned long long k, int b) {
  mpz_class num = 0, den = 1;
  while (k > 0) {
    den *= b;
    num = num * b + static_cast<long>(k % b);
    k /= b;
  }
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Polynomial restricted to the quantified variables with a float shadow for
// a fast sign test.
struct Checker {
  struct Row {
    RatPolynomial exact;
    CompiledPolynomial fast;
    CompiledPolynomial magnitude;
  };
  std::vector<Row> premises;
  Row consequent;
  const ConditionProblem* cond;

  static Row make_row(const RatPolynomial& p) {
    Row row;
    row.exact = p;
    const FloatPolynomial f = to_float(p);
    row.fast = CompiledPolynomial(f);
    FloatPolynomial mag(f.universe());
    for (const auto& [m, c] : f.terms()) mag.add_term(m, std::fabs(c));
    row.magnitude = CompiledPolynomial(mag);
    return row;
  }

  explicit Checker(const ConditionProblem& c) : cond(&c) {
    for (const auto& g : c.domain.constraints) premises.push_back(make_row(g));
    consequent = make_row(c.objective);
  }

  // Sign of the row at the point: -1, 0, 1. Exact when the float value is
  // not clearly separated from zero.
  static int sign(const Row& row, const std::vector<Rational>& exact, const std::vector<double>& fp,
                  const std::vector<double>& abs_fp) {
    const double v = row.fast.evaluate(fp);
    const double bound = 1e-9 * (row.magnitude.evaluate(abs_fp) + 1e-300);
    if (v > bound) return 1;
    if (v < -bound) return -1;
    return sgn(row.exact.evaluate(exact));
  }

  bool inside(const std::vector<Rational>& exact, const std::vector<double>& fp,
              const std::vector<double>& abs_fp) const {
    for (const auto& row : premises) {
      if (sign(row, exact, fp, abs_fp) > 0) return false;
    }
    return true;
  }

  bool violates(const std::vector<Rational>& exact, const std::vector<double>& fp,
                const std::vector<double>& abs_fp) const {
    return sign(consequent, exact, fp, abs_fp) > 0;
  }

  // Float score for the ascent: l inside the premise, -inf outside.
  double score(const std::vector<double>& fp) const {
    for (const auto& row : premises) {
      if (row.fast.evaluate(fp) > 0) return -INFINITY;
    }
    return consequent.fast.evaluate(fp);
  }
};

struct PointBuffer {
  std::vector<Rational> exact;
  std::vector<double> fp, abs_fp;

  explicit PointBuffer(int n) : exact(n, Rational(0)), fp(n, 0.0), abs_fp(n, 0.0) {}

  void set(int index, const Rational& v) {
    exact[index] = v;
    fp[index] = rational_to_double(v);
    abs_fp[index] = std::fabs(fp[index]);
  }
};

Counterexample make_counterexample(const ConditionProblem& cond, const std::vector<Rational>& pt) {
  Counterexample cx;
  cx.condition_id = cond.id();
  cx.condition_index = cond.index;
  for (int q : cond.quantified) {
    cx.names.push_back(cond.universe->name(q));
    cx.point.push_back(pt[q]);
  }
  cx.violation = cond.objective.evaluate(pt);
  return cx;
}

std::string script_name(const ConditionProblem& cond, bool multiple) {
  std::string name = "cond_" + std::to_string(cond.index);
  if (multiple) name += "_" + std::to_string(cond.sub_index);
  return name + ".smt2";
}

std::string first_token(const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  in >> tok;
  return tok;
}

}  // namespace

Rational round_decimal(double value, int digits) {
  if (!std::isfinite(value)) throw UsageError("cannot rationalize a non-finite value");
  if (digits < 0) throw UsageError("digit count must be non-negative");
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  const Rational scaled = rational_from_double(value) * Rational(scale);
  // Nearest integer, ties away from zero.
  const Rational shifted = scaled + Rational(sgn(scaled) < 0 ? -1 : 1, 2);
  mpz_class q;
  mpz_tdiv_q(q.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
  Rational r(q, scale);
  r.canonicalize();
  return r;
}

RationalCandidate rationalize(const std::vector<double>& a0, const Box& param_box,
                              const Underapprox* underapprox) {
  if (param_box.size() != a0.size()) throw UsageError("candidate and parameter box differ in size");
  RationalCandidate out;
  out.a0 = a0;
  long long cap = 1;
  for (int digits = 1; digits <= 6; ++digits) {
    cap *= 10;
    RoundingLevel lv;
    lv.denominator_cap = cap;
    for (size_t k = 0; k < a0.size(); ++k) {
      Rational v = round_decimal(a0[k], digits);
      if (v < param_box[k].lo) v = param_box[k].lo;
      if (v > param_box[k].hi) v = param_box[k].hi;
      lv.values.push_back(v);
    }
    if (!out.levels.empty() && out.levels.back().values == lv.values) continue;
    if (underapprox) {
      std::vector<double> fp;
      for (const auto& v : lv.values) fp.push_back(rational_to_double(v));
      lv.margin = underapprox->margin(fp);
    }
    out.levels.push_back(std::move(lv));
  }
  return out;
}

std::vector<ConditionProblem> instantiate_conditions(const GuardedLoop& loop,
                                                     const TemplateSpec& tmpl,
                                                     const std::vector<Rational>& a) {
  if (static_cast<int>(a.size()) != tmpl.num_params()) {
    throw UsageError("parameter vector has the wrong size");
  }
  ConditionOptions opts;
  opts.tighten = false;
  ConditionSet cs = build_conditions(loop, tmpl, opts);
  std::vector<ConditionProblem> out;
  for (auto& c : cs.problems) {
    std::map<int, Rational> values;
    Box point_box;
    for (size_t k = 0; k < c.params.size(); ++k) {
      values[c.params[k]] = a[k];
      point_box.push_back({a[k], a[k]});
    }
    c.objective = c.objective.partial_evaluate(values);
    for (auto& g : c.domain.constraints) g = g.partial_evaluate(values);
    c.param_box = point_box;
    Box tight = tighten_domain_box(c.domain, c.params, c.param_box);
    if (!tight.empty()) c.domain.box = std::move(tight);
    out.push_back(std::move(c));
  }
  return out;
}

std::optional<Counterexample> falsify_condition(const ConditionProblem& cond,
                                                const FalsifyOptions& options) {
  if (options.samples < 1) throw UsageError("samples must be at least 1");
  const Checker checker(cond);
  const int n = cond.universe->size();
  const int nq = static_cast<int>(cond.quantified.size());
  if (nq > static_cast<int>(std::size(kPrimes))) throw UsageError("too many quantified variables");
  PointBuffer pt(n);
  for (size_t k = 0; k < cond.params.size(); ++k) {
    pt.set(cond.params[k], cond.param_box[k].lo);
  }
  std::vector<Rational> lo(nq), width(nq);
  for (int k = 0; k < nq; ++k) {
    lo[k] = cond.domain.box[k].lo;
    width[k] = cond.domain.box[k].hi - cond.domain.box[k].lo;
  }
  auto check = [&]() -> std::optional<Counterexample> {
    if (checker.inside(pt.exact, pt.fp, pt.abs_fp) && checker.violates(pt.exact, pt.fp, pt.abs_fp)) {
      return make_counterexample(cond, pt.exact);
    }
    return std::nullopt;
  };

  // Box corners.
  if (nq <= 16) {
    for (long long mask = 0; mask < (1LL << nq); ++mask) {
      for (int k = 0; k < nq; ++k) {
        pt.set(cond.quantified[k], (mask >> k) & 1 ? cond.domain.box[k].hi : cond.domain.box[k].lo);
      }
      if (auto cx = check()) return cx;
    }
  }

  // Halton samples; consecutive samples on opposite sides of the premise
  // boundary are kept for bisection.
  const unsigned long long offset = 1 + (options.seed % 1000003ULL) * 7919ULL;
  std::vector<Rational> prev(nq);
  bool prev_inside = false;
  std::vector<std::pair<std::vector<Rational>, std::vector<Rational>>> straddles;
  std::vector<Rational> cur(nq);
  // Highest-l inside samples seed the ascent.
  std::vector<std::pair<double, std::vector<double>>> best;
  for (long long s = 0; s < options.samples; ++s) {
    for (int k = 0; k < nq; ++k) {
      cur[k] = lo[k] + width[k] * halton(offset + static_cast<unsigned long long>(s), kPrimes[k]);
      pt.set(cond.quantified[k], cur[k]);
    }
    const bool in = checker.inside(pt.exact, pt.fp, pt.abs_fp);
    if (in && checker.violates(pt.exact, pt.fp, pt.abs_fp)) return make_counterexample(cond, pt.exact);
    if (in && options.ascent_starts > 0) {
      const double l = checker.consequent.fast.evaluate(pt.fp);
      if (static_cast<int>(best.size()) < options.ascent_starts || l > best.back().first) {
        std::vector<double> q(nq);
        for (int k = 0; k < nq; ++k) q[k] = pt.fp[cond.quantified[k]];
        best.insert(std::upper_bound(best.begin(), best.end(), l,
                                     [](double v, const auto& e) { return v > e.first; }),
                    {l, std::move(q)});
        if (static_cast<int>(best.size()) > options.ascent_starts) best.pop_back();
      }
    }
    if (s > 0 && in != prev_inside && static_cast<int>(straddles.size()) < options.boundary_pairs) {
      if (in) {
        straddles.push_back({cur, prev});
      } else {
        straddles.push_back({prev, cur});
      }
    }
    prev = cur;
    prev_inside = in;
  }

  // Pattern search on l from the best samples; only exact checks decide.
  std::vector<double> fp = pt.fp;
  std::vector<double> lo_d(nq), hi_d(nq);
  for (int k = 0; k < nq; ++k) {
    lo_d[k] = rational_to_double(cond.domain.box[k].lo);
    hi_d[k] = rational_to_double(cond.domain.box[k].hi);
  }
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  for (auto& [value, start] : best) {
    std::vector<double> x = start;
    double fx = value;
    double step = 0.1;
    int failures = 0;
    for (int it = 0; it < options.ascent_iters && step > 1e-13; ++it) {
      std::vector<double> y = x;
      const int axis = it % (2 * nq + 1);
      for (int k = 0; k < nq; ++k) {
        double d = axis == 2 * nq ? normal(rng) : (axis / 2 == k ? (axis % 2 ? -1.0 : 1.0) : 0.0);
        y[k] = std::clamp(x[k] + step * (hi_d[k] - lo_d[k]) * d, lo_d[k], hi_d[k]);
      }
      for (int k = 0; k < nq; ++k) fp[cond.quantified[k]] = y[k];
      const double fy = checker.score(fp);
      if (fy > fx) {
        x = std::move(y);
        fx = fy;
        failures = 0;
        step *= 1.5;
      } else if (++failures > 2 * nq + 1) {
        step *= 0.5;
        failures = 0;
      }
    }
    for (int k = 0; k < nq; ++k) pt.set(cond.quantified[k], rational_from_double(x[k]));
    if (checker.inside(pt.exact, pt.fp, pt.abs_fp) && checker.violates(pt.exact, pt.fp, pt.abs_fp)) {
      return make_counterexample(cond, pt.exact);
    }
  }

  // Bisection toward the premise boundary from the inside.
  for (auto& [inner, outer] : straddles) {
    for (int step = 0; step < options.bisection_steps; ++step) {
      std::vector<Rational> mid(nq);
      for (int k = 0; k < nq; ++k) {
        mid[k] = (inner[k] + outer[k]) / 2;
        pt.set(cond.quantified[k], mid[k]);
      }
      if (checker.inside(pt.exact, pt.fp, pt.abs_fp)) {
        if (checker.violates(pt.exact, pt.fp, pt.abs_fp)) return make_counterexample(cond, pt.exact);
        inner = std::move(mid);
      } else {
        outer = std::move(mid);
      }
    }
  }
  return std::nullopt;
}

std::optional<Counterexample> falsify(const GuardedLoop& loop, const TemplateSpec& tmpl,
                                      const std::vector<Rational>& a,
                                      const FalsifyOptions& options) {
  for (const auto& cond : instantiate_conditions(loop, tmpl, a)) {
    if (auto cx = falsify_condition(cond, options)) return cx;
  }
  return std::nullopt;
}

std::string smt_numeral(const Rational& value) {
  Rational v = value;
  v.canonicalize();
  const bool negative = sgn(v) < 0;
  const mpz_class num = abs(v.get_num());
  const mpz_class den = v.get_den();
  std::string body;
  if (den == 1) {
    body = num.get_str();
  } else {
    mpz_class d = den;
    int twos = 0, fives = 0;
    while (mpz_divisible_ui_p(d.get_mpz_t(), 2)) {
      d /= 2;
      ++twos;
    }
    while (mpz_divisible_ui_p(d.get_mpz_t(), 5)) {
      d /= 5;
      ++fives;
    }
    if (d == 1) {
      mpz_class ten_k;
      mpz_ui_pow_ui(ten_k.get_mpz_t(), 10, static_cast<unsigned long>(std::max(twos, fives)));
      body = "(/ " + mpz_class(num * (ten_k / den)).get_str() + " " + ten_k.get_str() + ")";
    } else {
      body = "(/ " + num.get_str() + " " + den.get_str() + ")";
    }
  }
  return negative ? "(- " + body + ")" : body;
}

std::string smt_term(const RatPolynomial& p) {
  if (p.is_zero()) return "0";
  std::vector<std::string> terms;
  const auto& u = *p.universe();
  for (const auto& [mono, c] : p.terms()) {
    std::vector<std::string> factors;
    if (c != 1 || mono.is_constant()) factors.push_back(smt_numeral(c));
    for (int v = 0; v < mono.size(); ++v) {
      for (int e = 0; e < mono[v]; ++e) factors.push_back(u.name(v));
    }
    if (factors.size() == 1) {
      terms.push_back(factors[0]);
    } else {
      std::string t = "(*";
      for (const auto& f : factors) t += " " + f;
      terms.push_back(t + ")");
    }
  }
  if (terms.size() == 1) return terms[0];
  std::string out = "(+";
  for (const auto& t : terms) out += " " + t;
  return out + ")";
}

std::vector<SmtScript> emit_smtlib(const GuardedLoop& loop, const TemplateSpec& tmpl,
                                   const std::vector<Rational>& a) {
  const auto conds = instantiate_conditions(loop, tmpl, a);
  std::map<int, int> per_index;
  for (const auto& c : conds) ++per_index[c.index];
  std::vector<SmtScript> out;
  for (const auto& c : conds) {
    std::ostringstream s;
    s << "; condition " << c.id() << " (" << to_string(c.kind) << ")\n";
    s << "; " << implication_string(c) << "\n";
    s << "(set-option :produce-models true)\n";
    s << "(set-logic QF_NRA)\n";
    for (int q : c.quantified) s << "(declare-fun " << c.universe->name(q) << " () Real)\n";
    for (size_t k = 0; k < c.quantified.size(); ++k) {
      const std::string& name = c.universe->name(c.quantified[k]);
      s << "(assert (<= " << smt_numeral(c.original_box[k].lo) << " " << name << "))\n";
      s << "(assert (<= " << name << " " << smt_numeral(c.original_box[k].hi) << "))\n";
    }
    for (const auto& g : c.domain.constraints) s << "(assert (<= " << smt_term(g) << " 0))\n";
    s << "(assert (not (<= " << smt_term(c.objective) << " 0)))\n";
    s << "(check-sat)\n(get-model)\n(exit)\n";
    SmtScript script;
    script.condition_id = c.id();
    script.condition_index = c.index;
    script.file_name = script_name(c, per_index[c.index] > 1);
    script.text = s.str();
    out.push_back(std::move(script));
  }
  return out;
}

const char* to_string(ConditionVerdict verdict) {
  switch (verdict) {
    case ConditionVerdict::kFalsified: return "falsified";
    case ConditionVerdict::kSampleClean: return "sample_clean";
    case ConditionVerdict::kExternallyVerified: return "externally_verified";
    case ConditionVerdict::kExternalUnknown: return "external_unknown";
  }
  return "unknown";
}

const char* to_string(OverallVerdict verdict) {
  switch (verdict) {
    case OverallVerdict::kVerified: return "verified";
    case OverallVerdict::kCandidateOnly: return "candidate_only";
    case OverallVerdict::kRefuted: return "refuted";
  }
  return "unknown";
}

void finalize_verdict(Verdict& verdict) {
  bool all_verified = !verdict.conditions.empty();
  bool any_falsified = false;
  for (const auto& c : verdict.conditions) {
    any_falsified = any_falsified || c.verdict == ConditionVerdict::kFalsified;
    all_verified = all_verified && c.verdict == ConditionVerdict::kExternallyVerified;
  }
  verdict.overall = any_falsified  ? OverallVerdict::kRefuted
                    : all_verified ? OverallVerdict::kVerified
                                   : OverallVerdict::kCandidateOnly;
}

std::string resolve_smt_solver(const std::string& configured) {
  if (!configured.empty()) return configured;
  if (const char* env = std::getenv("SEMIALG_INV_SMT_SOLVER"); env && *env) return env;
  return {};
}

void verify_external(const std::vector<SmtScript>& scripts, const ExternalOptions& options,
                     Verdict& verdict) {
  namespace fs = std::filesystem;
  const std::string solver = resolve_smt_solver(options.solver);
  std::string dir = options.out_dir;
  if (dir.empty()) {
    std::string tmpl = (fs::temp_directory_path() / "semialg-smt-XXXXXX").string();
    if (mkdtemp(tmpl.data()) == nullptr) throw ConfigError("cannot create a temporary directory");
    dir = tmpl;
  }
  fs::create_directories(dir);
  std::vector<std::string> paths;
  for (const auto& s : scripts) {
    const fs::path path = fs::path(dir) / s.file_name;
    std::ofstream out(path);
    out << s.text;
    if (!out) throw ConfigError("cannot write " + path.string());
    paths.push_back(path.string());
  }
  auto find_check = [&](const std::string& id) -> ConditionCheck& {
    for (auto& c : verdict.conditions) {
      if (c.condition_id == id) return c;
    }
    verdict.conditions.push_back({});
    verdict.conditions.back().condition_id = id;
    return verdict.conditions.back();
  };
  for (size_t i = 0; i < scripts.size(); ++i) find_check(scripts[i].condition_id).smt_file = paths[i];
  std::vector<ConditionCheck*> checks;
  for (const auto& s : scripts) checks.push_back(&find_check(s.condition_id));
  if (solver.empty()) {
    finalize_verdict(verdict);
    return;
  }

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next++; i < scripts.size(); i = next++) {
      ConditionCheck& c = *checks[i];
      if (c.verdict == ConditionVerdict::kFalsified) continue;
      const ProcessResult res = run_process({solver, paths[i]}, options.timeout_secs);
      if (!res.started) {
        c.solver_answer = "failed to start " + solver;
        c.verdict = ConditionVerdict::kExternalUnknown;
        continue;
      }
      if (res.timed_out) {
        c.solver_answer = "timeout";
        c.verdict = ConditionVerdict::kExternalUnknown;
        continue;
      }
      c.solver_answer = first_token(res.output);
      if (c.solver_answer == "unsat") {
        c.verdict = ConditionVerdict::kExternallyVerified;
      } else if (c.solver_answer == "sat") {
        c.verdict = ConditionVerdict::kFalsified;
        const ParsedScript parsed = parse_script(scripts[i].text);
        const SmtModel model = parse_model(res.output.substr(res.output.find("sat") + 3));
        Counterexample cx;
        cx.condition_id = scripts[i].condition_id;
        cx.condition_index = scripts[i].condition_index;
        std::vector<Rational> point;
        bool complete = true;
        for (const auto& name : parsed.universe->names()) {
          auto it = model.values.find(name);
          if (it == model.values.end()) {
            complete = false;
            break;
          }
          cx.names.push_back(name);
          cx.point.push_back(it->second);
        }
        if (complete && !parsed.atoms.empty()) {
          const SmtAtom& negated = parsed.atoms.back();
          cx.violation = negated.difference.evaluate(cx.point);
          c.counterexample = std::move(cx);
        }
      } else {
        c.verdict = ConditionVerdict::kExternalUnknown;
        if (c.solver_answer.empty()) c.solver_answer = "no output";
      }
    }
  };
  const int count = std::max(1, std::min<int>(options.threads, static_cast<int>(scripts.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  finalize_verdict(verdict);
}

PosteriorResult posterior_check(const GuardedLoop& loop, const TemplateSpec& tmpl,
                                const std::vector<double>& a0, const PosteriorOptions& options,
                                const Underapprox* underapprox) {
  PosteriorResult res;
  res.candidate = rationalize(a0, tmpl.param_box, underapprox);
  for (size_t li = 0; li < res.candidate.levels.size(); ++li) {
    const auto& values = res.candidate.levels[li].values;
    Verdict v;
    v.level = static_cast<int>(li);
    bool clean = true;
    for (const auto& cond : instantiate_conditions(loop, tmpl, values)) {
      ConditionCheck check;
      check.condition_id = cond.id();
      check.counterexample = falsify_condition(cond, options.falsify);
      if (check.counterexample) {
        check.verdict = ConditionVerdict::kFalsified;
        clean = false;
      }
      v.conditions.push_back(std::move(check));
    }
    res.verdict = std::move(v);
    if (clean) {
      if (!options.external.out_dir.empty() || !resolve_smt_solver(options.external.solver).empty()) {
        verify_external(emit_smtlib(loop, tmpl, values), options.external, res.verdict);
      }
      break;
    }
  }
  finalize_verdict(res.verdict);
  return res;
}

}  // namespace semialg
