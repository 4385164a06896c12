#include "semialg/sos.h"

#include <algorithm>
#include <set>

#include "semialg/errors.h"

namespace semialg {

namespace {

Rational pow_q(const Rational& base, int e) {
  Rational r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

Rational max_abs(const Interval& iv) { return std::max(abs(iv.lo), abs(iv.hi)); }

}  // namespace

Rational box_moment(const Box& box, const std::vector<int>& alpha) {
  if (alpha.size() != box.size()) throw UsageError("moment exponent does not match box");
  Rational value = 1;
  for (size_t j = 0; j < box.size(); ++j) {
    const Rational& lo = box[j].lo;
    const Rational& hi = box[j].hi;
    if (lo >= hi) throw UsageError("degenerate interval has measure zero");
    const int k = alpha[j];
    value *= (pow_q(hi, k + 1) - pow_q(lo, k + 1)) / (Rational(k + 1) * (hi - lo));
  }
  value.canonicalize();
  return value;
}

MomentVector moments(const Box& box, int max_degree) {
  std::vector<std::string> names;
  for (size_t j = 0; j < box.size(); ++j) names.push_back("a" + std::to_string(j));
  const UniversePtr u = make_universe(names);
  std::vector<int> vars(box.size());
  for (size_t j = 0; j < box.size(); ++j) vars[j] = static_cast<int>(j);
  MomentVector mv;
  for (const Monomial& m : monomial_basis(*u, vars, max_degree)) {
    mv.values.emplace(m, box_moment(box, m.exponents()));
  }
  return mv;
}

Rational MomentVector::exact(const Monomial& alpha) const {
  auto it = values.find(alpha);
  if (it == values.end()) throw UsageError("moment not available for this degree");
  return it->second;
}

double MomentVector::value(const Monomial& alpha) const {
  return rational_to_double(exact(alpha));
}

AffineMap AffineMap::identity(int size) {
  return {std::vector<Rational>(size, 0), std::vector<Rational>(size, 1)};
}

RatPolynomial AffineMap::to_scaled(const RatPolynomial& p) const {
  const UniversePtr& u = p.universe();
  std::map<int, RatPolynomial> b;
  for (int i = 0; i < u->size(); ++i) {
    if (center[i] == 0 && half[i] == 1) continue;
    b.emplace(i, RatPolynomial(u, center[i]) + RatPolynomial::variable(u, i) * half[i]);
  }
  return p.substitute(b);
}

RatPolynomial AffineMap::to_original(const RatPolynomial& q) const {
  const UniversePtr& u = q.universe();
  std::map<int, RatPolynomial> b;
  for (int i = 0; i < u->size(); ++i) {
    if (center[i] == 0 && half[i] == 1) continue;
    const Rational inv = 1 / half[i];
    b.emplace(i, (RatPolynomial::variable(u, i) - RatPolynomial(u, center[i])) * inv);
  }
  return q.substitute(b);
}

FloatPolynomial AffineMap::to_original(const FloatPolynomial& q) const {
  const UniversePtr& u = q.universe();
  std::map<int, FloatPolynomial> b;
  for (int i = 0; i < u->size(); ++i) {
    if (center[i] == 0 && half[i] == 1) continue;
    const double inv = rational_to_double(1 / half[i]);
    const double c = rational_to_double(center[i]);
    b.emplace(i, (FloatPolynomial::variable(u, i) - FloatPolynomial(u, c)) * inv);
  }
  return q.substitute(b);
}

std::vector<double> AffineMap::point_to_scaled(const std::vector<double>& v) const {
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    out[i] = (v[i] - rational_to_double(center[i])) / rational_to_double(half[i]);
  }
  return out;
}

std::pair<ConditionProblem, AffineMap> scale_to_unit(const ConditionProblem& cond) {
  AffineMap map = AffineMap::identity(cond.universe->size());
  auto set_from = [&](int var, const Interval& iv) {
    if (iv.lo >= iv.hi) {
      throw UsageError("degenerate interval for '" + cond.universe->name(var) + "'");
    }
    map.center[var] = (iv.lo + iv.hi) / 2;
    map.half[var] = (iv.hi - iv.lo) / 2;
    map.center[var].canonicalize();
    map.half[var].canonicalize();
  };
  for (size_t k = 0; k < cond.params.size(); ++k) set_from(cond.params[k], cond.param_box[k]);
  for (size_t k = 0; k < cond.domain.box_vars.size(); ++k) {
    set_from(cond.domain.box_vars[k], cond.domain.box[k]);
  }
  ConditionProblem s = cond;
  s.objective = map.to_scaled(cond.objective);
  for (auto& g : s.domain.constraints) g = map.to_scaled(g);
  for (auto& iv : s.param_box) iv = {-1, 1};
  for (size_t k = 0; k < s.domain.box_vars.size(); ++k) {
    const int v = s.domain.box_vars[k];
    s.domain.box[k] = {-1, 1};
    Interval o = cond.original_box.at(k);
    o.lo = (o.lo - map.center[v]) / map.half[v];
    o.hi = (o.hi - map.center[v]) / map.half[v];
    s.original_box[k] = o;
  }
  return {std::move(s), std::move(map)};
}

SosProgram build_relaxation(const ConditionProblem& cond, const RelaxationOptions& options) {
  if (options.degree < 1) throw SizingError("relaxation degree must be at least 1");
  ConditionProblem sc;
  AffineMap map = AffineMap::identity(cond.universe->size());
  if (options.scale) {
    std::tie(sc, map) = scale_to_unit(cond);
  } else {
    sc = cond;
  }
  const UniversePtr& u = sc.universe;

  SosProgram prog;
  prog.condition_id = cond.id();
  prog.universe = u;
  prog.params = sc.params;
  prog.quantified = sc.quantified;
  prog.degree = options.degree;
  prog.back_map = map;
  prog.big_m = sc.big_m;

  const int deg_a_l = sc.objective.is_zero() ? 0 : sc.objective.degree_in(sc.params);
  prog.p_degree = options.p_degree > 0 ? options.p_degree : std::max(2 * options.degree, deg_a_l);
  if (prog.p_degree < deg_a_l) {
    throw SizingError("degree of p (" + std::to_string(prog.p_degree) +
                      ") is below the parameter degree of the objective (" +
                      std::to_string(deg_a_l) + ")");
  }
  prog.p_basis = monomial_basis(*u, sc.params, prog.p_degree);

  // Moments over the parameter box in the identity's coordinates.
  const MomentVector gamma = moments(sc.param_box, prog.p_degree);
  for (const Monomial& m : prog.p_basis) {
    std::vector<int> alpha;
    for (int v : sc.params) alpha.push_back(m[v]);
    prog.objective.push_back(gamma.value(Monomial(alpha)));
  }

  prog.coordinate_box.assign(u->size(), Interval{0, 0});
  for (size_t k = 0; k < sc.params.size(); ++k) prog.coordinate_box[sc.params[k]] = sc.param_box[k];
  for (size_t k = 0; k < sc.domain.box_vars.size(); ++k) {
    prog.coordinate_box[sc.domain.box_vars[k]] = sc.domain.box[k];
  }

  std::vector<int> vars = sc.params;
  vars.insert(vars.end(), sc.quantified.begin(), sc.quantified.end());
  std::sort(vars.begin(), vars.end());

  struct Mult {
    std::string label;
    RatPolynomial poly;
  };
  std::vector<Mult> box_mults;
  auto add_box = [&](int var, const Interval& iv) {
    const RatPolynomial v = RatPolynomial::variable(u, var);
    box_mults.push_back({"box_lo[" + u->name(var) + "]", v - RatPolynomial(u, iv.lo)});
    box_mults.push_back({"box_hi[" + u->name(var) + "]", RatPolynomial(u, iv.hi) - v});
  };
  for (size_t k = 0; k < sc.params.size(); ++k) add_box(sc.params[k], sc.param_box[k]);
  for (size_t k = 0; k < sc.domain.box_vars.size(); ++k) {
    add_box(sc.domain.box_vars[k], sc.domain.box[k]);
  }
  if (options.balls) {
    auto add_ball = [&](const std::string& label, const std::vector<int>& vs) {
      if (vs.empty()) return;
      RatPolynomial ball(u);
      for (int v : vs) {
        const Interval& iv = prog.coordinate_box[v];
        const Rational r = max_abs(iv);
        ball += RatPolynomial(u, r * r) - RatPolynomial::variable(u, v).pow(2);
      }
      box_mults.push_back({label, ball});
    };
    add_ball("ball_a", sc.params);
    add_ball("ball_x", sc.quantified);
  }
  std::vector<Mult> domain_mults;
  for (size_t j = 0; j < sc.domain.constraints.size(); ++j) {
    domain_mults.push_back({"K[" + std::to_string(j) + "]", -sc.domain.constraints[j]});
  }

  auto build_identity = [&](int id, const std::string& label, const RatPolynomial& offset,
                            int lhs_degree, const std::vector<Mult>& mults, int absolute) {
    int max_mult = 0;
    for (const auto& mu : mults) max_mult = std::max(max_mult, mu.poly.degree());
    const int d_min = (std::max(lhs_degree, max_mult) + 1) / 2;
    int half = d_min + options.degree - 1;
    if (absolute > 0) {
      if (2 * absolute < lhs_degree) {
        throw SizingError("identity " + label + " has degree " + std::to_string(lhs_degree) +
                          " but the Gram half-degree " + std::to_string(absolute) +
                          " only reaches degree " + std::to_string(2 * absolute));
      }
      half = absolute;
    }
    SosIdentity ident;
    ident.label = label;
    ident.exact_offset = offset;
    ident.offset = to_float(offset);
    ident.half_degree = half;
    prog.identities.push_back(ident);
    prog.slots.push_back({label + ".sigma0", id, FloatPolynomial(u, 1.0),
                          monomial_basis(*u, vars, half)});
    for (const auto& mu : mults) {
      const int e = mu.poly.degree();
      if (e > 2 * half || mu.poly.is_zero()) continue;
      const int h = (2 * half - e) / 2;
      prog.slots.push_back({label + "." + mu.label, id, to_float(mu.poly),
                            monomial_basis(*u, vars, h)});
    }
  };

  std::vector<Mult> mults_a = domain_mults;
  mults_a.insert(mults_a.end(), box_mults.begin(), box_mults.end());
  const int lhs_a = std::max(prog.p_degree, sc.objective.is_zero() ? 0 : sc.objective.degree());
  build_identity(0, "A", -sc.objective, lhs_a, mults_a, options.absolute_half_degree);
  build_identity(1, "B", RatPolynomial(u, sc.big_m), prog.p_degree, box_mults, 0);
  return prog;
}

std::vector<Box> partition_box(const Box& box, int cells_per_dim) {
  if (cells_per_dim < 1) throw UsageError("cells per dimension must be positive");
  std::vector<Box> cells{Box{}};
  for (const Interval& iv : box) {
    std::vector<Box> next;
    const Rational w = (iv.hi - iv.lo) / cells_per_dim;
    for (const Box& c : cells) {
      for (int k = 0; k < cells_per_dim; ++k) {
        Box e = c;
        Interval part{iv.lo + w * k, iv.lo + w * (k + 1)};
        part.lo.canonicalize();
        part.hi.canonicalize();
        e.push_back(part);
        next.push_back(std::move(e));
      }
    }
    cells = std::move(next);
  }
  return cells;
}

ConditionProblem restrict_params(const ConditionProblem& cond, const Box& cell) {
  if (cell.size() != cond.param_box.size()) throw UsageError("cell does not match parameter box");
  ConditionProblem c = cond;
  c.param_box = cell;
  return c;
}

}  // namespace semialg
