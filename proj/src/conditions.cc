#include "semialg/conditions.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "semialg/errors.h"
#include "semialg/interval.h"

namespace semialg {

std::vector<RatPolynomial> SemialgSet::all_constraints() const {
  std::vector<RatPolynomial> out = constraints;
  for (size_t k = 0; k < box_vars.size(); ++k) {
    const RatPolynomial v = RatPolynomial::variable(universe, box_vars[k]);
    out.push_back(RatPolynomial(universe, box[k].lo) - v);
    out.push_back(v - RatPolynomial(universe, box[k].hi));
  }
  return out;
}

bool SemialgSet::contains(const std::vector<Rational>& point) const {
  for (size_t k = 0; k < box_vars.size(); ++k) {
    const Rational& v = point.at(box_vars[k]);
    if (v < box[k].lo || v > box[k].hi) return false;
  }
  for (const auto& g : constraints) {
    if (sgn(g.evaluate(point)) > 0) return false;
  }
  return true;
}

const char* to_string(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::kInitiation:
      return "initiation";
    case ConditionKind::kConsecution:
      return "consecution";
    case ConditionKind::kPostcondition:
      return "postcondition";
  }
  return "unknown";
}

std::string ConditionProblem::id() const {
  return std::to_string(index) + "." + std::to_string(sub_index);
}

UniversePtr joint_universe(const GuardedLoop& loop, const TemplateSpec& tmpl) {
  std::vector<std::string> names = tmpl.params->names();
  for (const auto& n : loop.state->names()) {
    if (tmpl.params->index_of(n)) {
      throw UsageError("parameter '" + n + "' clashes with a program variable");
    }
    names.push_back(n);
  }
  return make_universe(names);
}

Box tighten_domain_box(const SemialgSet& domain, const std::vector<int>& param_indices,
                       const Box& param_box) {
  const int n = domain.universe->size();
  std::vector<FloatInterval> box(n, FloatInterval{0.0, 0.0});
  const std::vector<FloatInterval> pf = to_float_box(param_box);
  for (size_t k = 0; k < param_indices.size(); ++k) box[param_indices[k]] = pf[k];
  const std::vector<FloatInterval> qf = to_float_box(domain.box);
  for (size_t k = 0; k < domain.box_vars.size(); ++k) box[domain.box_vars[k]] = qf[k];
  std::vector<FloatPolynomial> constraints;
  for (const auto& g : domain.constraints) constraints.push_back(to_float(g));
  auto hull = bound_feasible_set(constraints, box, domain.box_vars);
  if (!hull) return {};
  Box out;
  for (size_t k = 0; k < domain.box_vars.size(); ++k) {
    const FloatInterval& h = (*hull)[domain.box_vars[k]];
    out.push_back(round_outward(h.lo, h.hi, domain.box[k]));
  }
  return out;
}

ConditionSet build_conditions(const GuardedLoop& loop, const TemplateSpec& tmpl,
                              const ConditionOptions& options) {
  if (sgn(options.big_m) <= 0) throw ConfigError("big-M must be positive");
  ConditionSet set;
  set.universe = joint_universe(loop, tmpl);
  const UniversePtr& u = set.universe;
  const int m = tmpl.num_params();
  const int n = loop.num_vars();
  const int nd = loop.num_disturbances();
  set.num_params = m;

  std::vector<int> params(m), vars(n), vars_and_dist(n + nd);
  for (int i = 0; i < m; ++i) params[i] = i;
  for (int i = 0; i < n; ++i) vars[i] = m + i;
  for (int i = 0; i < n + nd; ++i) vars_and_dist[i] = m + i;

  auto rebase_all = [&](const std::vector<RatPolynomial>& ps) {
    std::vector<RatPolynomial> out;
    for (const auto& p : ps) out.push_back(p.rebase(u));
    return out;
  };
  const std::vector<RatPolynomial> pre = rebase_all(loop.pre);
  const std::vector<RatPolynomial> post = rebase_all(loop.post);
  const std::vector<RatPolynomial> inv = rebase_all(tmpl.conjuncts);

  auto make = [&](int index, int sub, ConditionKind kind, RatPolynomial l,
                  std::vector<RatPolynomial> constraints, bool with_dist) {
    ConditionProblem c;
    c.index = index;
    c.sub_index = sub;
    c.kind = kind;
    c.universe = u;
    c.num_params = m;
    c.num_vars = n;
    c.num_disturbances = with_dist ? nd : 0;
    c.params = params;
    c.quantified = with_dist ? vars_and_dist : vars;
    c.objective = std::move(l);
    c.domain.universe = u;
    c.domain.constraints = std::move(constraints);
    c.domain.box_vars = c.quantified;
    c.domain.box = loop.var_box;
    if (with_dist) {
      c.domain.box.insert(c.domain.box.end(), loop.disturbance_box.begin(),
                          loop.disturbance_box.end());
    }
    c.original_box = c.domain.box;
    c.param_box = tmpl.param_box;
    c.big_m = options.big_m;
    if (options.tighten) {
      Box tight = tighten_domain_box(c.domain, c.params, c.param_box);
      if (!tight.empty()) c.domain.box = std::move(tight);
    }
    set.problems.push_back(std::move(c));
  };

  for (size_t r = 0; r < inv.size(); ++r) {
    make(0, static_cast<int>(r), ConditionKind::kInitiation, inv[r], pre, false);
  }

  const int k = static_cast<int>(loop.branches.size());
  for (int i = 0; i < k; ++i) {
    const Branch& b = loop.branches[i];
    std::map<int, RatPolynomial> bindings;
    for (int j = 0; j < n; ++j) bindings.emplace(m + j, b.update[j].rebase(u));
    std::vector<RatPolynomial> constraints = rebase_all(b.guards);
    constraints.insert(constraints.end(), inv.begin(), inv.end());
    for (size_t r = 0; r < inv.size(); ++r) {
      make(i + 1, static_cast<int>(r), ConditionKind::kConsecution, inv[r].substitute(bindings),
           constraints, nd > 0);
    }
  }

  // Exit region: an explicit clause, or every branch disabled. A branch with
  // several guards is disabled when any one of them fails, so the region is
  // a union of pieces, one per choice of failing guard.
  std::vector<std::vector<RatPolynomial>> pieces;
  if (loop.exit) {
    pieces.push_back(rebase_all(*loop.exit));
  } else {
    pieces.push_back({});
    for (const Branch& b : loop.branches) {
      if (b.guards.empty()) continue;
      std::vector<std::vector<RatPolynomial>> next;
      for (const auto& piece : pieces) {
        for (const auto& g : b.guards) {
          std::vector<RatPolynomial> extended = piece;
          extended.push_back(-g.rebase(u));
          next.push_back(std::move(extended));
        }
      }
      pieces = std::move(next);
    }
  }
  int sub = 0;
  for (const auto& piece : pieces) {
    std::vector<RatPolynomial> constraints = piece;
    constraints.insert(constraints.end(), inv.begin(), inv.end());
    for (const auto& q : post) {
      make(k + 1, sub++, ConditionKind::kPostcondition, q, constraints, false);
    }
  }
  return set;
}

double phi_oracle(const ConditionProblem& cond, const std::vector<double>& a, int density) {
  if (density < 2) throw UsageError("grid density must be at least 2");
  const int nq = static_cast<int>(cond.quantified.size());
  const CompiledPolynomial l(cond.objective);
  std::vector<CompiledPolynomial> gs;
  for (const auto& g : cond.domain.constraints) gs.emplace_back(g);
  std::vector<double> point(cond.universe->size(), 0.0);
  for (int i = 0; i < cond.num_params; ++i) point[cond.params[i]] = a.at(i);
  std::vector<double> lo(nq), hi(nq), step(nq);
  for (int k = 0; k < nq; ++k) {
    lo[k] = rational_to_double(cond.domain.box[k].lo);
    hi[k] = rational_to_double(cond.domain.box[k].hi);
    step[k] = (hi[k] - lo[k]) / (density - 1);
  }
  auto inside = [&](const std::vector<double>& v) {
    for (int k = 0; k < nq; ++k) {
      const double x = v[cond.quantified[k]];
      if (x < lo[k] || x > hi[k]) return false;
    }
    for (const auto& g : gs) {
      if (g.evaluate(v) > 0) return false;
    }
    return true;
  };

  // Grid pass, keeping the best few inside points.
  constexpr size_t kKeep = 8;
  std::vector<std::pair<double, std::vector<double>>> top;
  std::vector<int> idx(nq, 0);
  while (true) {
    for (int k = 0; k < nq; ++k) point[cond.quantified[k]] = lo[k] + step[k] * idx[k];
    if (inside(point)) {
      const double v = l.evaluate(point);
      if (top.size() < kKeep || v > top.back().first) {
        if (top.size() == kKeep) top.pop_back();
        auto pos = std::find_if(top.begin(), top.end(), [&](const auto& e) { return v > e.first; });
        top.insert(pos, {v, point});
      }
    }
    int k = 0;
    while (k < nq && ++idx[k] == density) idx[k++] = 0;
    if (k == nq) break;
  }

  // Pattern search from each kept point over the axis and diagonal
  // directions. A trial point outside K(a) is pulled back to the boundary by
  // bisection, so the search can slide along active constraints.
  std::vector<std::vector<int>> dirs;
  {
    const int span = nq <= 3 ? 3 : 1;
    std::vector<int> d(nq, -1);
    if (span == 3) {
      while (true) {
        if (std::any_of(d.begin(), d.end(), [](int e) { return e != 0; })) dirs.push_back(d);
        int k = 0;
        while (k < nq && ++d[k] == 2) d[k++] = -1;
        if (k == nq) break;
      }
    } else {
      for (int k = 0; k < nq; ++k) {
        for (int sgn : {1, -1}) {
          std::vector<int> e(nq, 0);
          e[k] = sgn;
          dirs.push_back(e);
        }
      }
    }
  }
  double best = top.empty() ? -INFINITY : top.front().first;
  for (auto& [value, v] : top) {
    std::vector<double> h = step;
    for (int round = 0; round < 200 && h[0] > 1e-12 * (hi[0] - lo[0] + 1); ++round) {
      bool moved = false;
      for (const auto& d : dirs) {
        std::vector<double> w = v;
        for (int k = 0; k < nq; ++k) w[cond.quantified[k]] += d[k] * h[k];
        if (!inside(w)) {
          double t_in = 0, t_out = 1;
          for (int it = 0; it < 20; ++it) {
            const double t = 0.5 * (t_in + t_out);
            std::vector<double> m = v;
            for (int k = 0; k < nq; ++k) m[cond.quantified[k]] += t * d[k] * h[k];
            (inside(m) ? t_in : t_out) = t;
          }
          if (t_in == 0) continue;
          w = v;
          for (int k = 0; k < nq; ++k) w[cond.quantified[k]] += t_in * d[k] * h[k];
        }
        const double lw = l.evaluate(w);
        if (lw > value) {
          value = lw;
          v = std::move(w);
          moved = true;
          break;
        }
      }
      if (!moved) {
        for (double& e : h) e *= 0.5;
      }
    }
    best = std::max(best, value);
  }
  return std::max(-rational_to_double(cond.big_m), best);
}

std::string implication_string(const ConditionProblem& cond) {
  std::string s;
  for (size_t i = 0; i < cond.domain.constraints.size(); ++i) {
    if (i > 0) s += " && ";
    s += "(" + cond.domain.constraints[i].to_string() + " <= 0)";
  }
  if (s.empty()) s = "true";
  return s + " ==> (" + cond.objective.to_string() + " <= 0)";
}

}  // namespace semialg
