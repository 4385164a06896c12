#include "semialg/extract.h"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "semialg/errors.h"

namespace semialg {

namespace {

bool in_cell(const Box& cell, const std::vector<double>& a) {
  for (size_t k = 0; k < cell.size(); ++k) {
    if (a[k] < rational_to_double(cell[k].lo) || a[k] > rational_to_double(cell[k].hi)) return false;
  }
  return true;
}

// Float copies of the pieces for repeated evaluation.
struct CompiledUnderapprox {
  struct Piece {
    std::vector<double> lo, hi;
    CompiledPolynomial p;
  };
  std::vector<std::vector<Piece>> entries;
  std::vector<double> lo, hi;

  explicit CompiledUnderapprox(const Underapprox& u) {
    for (const auto& iv : u.param_box) {
      lo.push_back(rational_to_double(iv.lo));
      hi.push_back(rational_to_double(iv.hi));
    }
    for (const auto& e : u.entries) {
      std::vector<Piece> pieces;
      for (const auto& pc : e.pieces) {
        Piece q;
        for (const auto& iv : pc.cell) {
          q.lo.push_back(rational_to_double(iv.lo));
          q.hi.push_back(rational_to_double(iv.hi));
        }
        q.p = CompiledPolynomial(pc.p);
        pieces.push_back(std::move(q));
      }
      entries.push_back(std::move(pieces));
    }
  }

  double margin(const double* a) const {
    const size_t m = lo.size();
    double best = -INFINITY;
    for (const auto& pieces : entries) {
      double v = INFINITY;
      for (const auto& pc : pieces) {
        bool inside = true;
        for (size_t k = 0; k < m && inside; ++k) inside = a[k] >= pc.lo[k] && a[k] <= pc.hi[k];
        if (inside) {
          v = pc.p.evaluate(a);
          break;
        }
      }
      best = std::max(best, v);
    }
    return best;
  }
};

struct NmContext {
  const CompiledUnderapprox* u;
  std::vector<double> buffer;
  double best = INFINITY;
  std::vector<double> best_point;
  long long evals = 0;
};

double nm_objective(const gsl_vector* v, void* params) {
  auto* ctx = static_cast<NmContext*>(params);
  const auto& lo = ctx->u->lo;
  const auto& hi = ctx->u->hi;
  double penalty = 0;
  for (size_t k = 0; k < lo.size(); ++k) {
    const double x = gsl_vector_get(v, k);
    const double c = std::clamp(x, lo[k], hi[k]);
    penalty += std::fabs(x - c);
    ctx->buffer[k] = c;
  }
  const double m = ctx->u->margin(ctx->buffer.data());
  ++ctx->evals;
  if (m < ctx->best) {
    ctx->best = m;
    ctx->best_point = ctx->buffer;
  }
  return m + 1e3 * penalty;
}

struct StartResult {
  std::vector<double> point;
  double margin = INFINITY;
  long long iterations = 0;
};

StartResult refine(const CompiledUnderapprox& cu, std::vector<double> start, int max_iters) {
  const size_t m = cu.lo.size();
  NmContext ctx;
  ctx.u = &cu;
  ctx.buffer.assign(m, 0.0);
  StartResult res;
  if (m == 0) {
    res.margin = cu.margin(start.data());
    return res;
  }
  gsl_multimin_function fn;
  fn.n = m;
  fn.f = nm_objective;
  fn.params = &ctx;
  gsl_vector* x = gsl_vector_alloc(m);
  gsl_vector* step = gsl_vector_alloc(m);
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, m);
  double scale = 0.1;
  // Restart from the best point with shrinking simplices; the objective is
  // a pointwise max and a single simplex run tends to stall on its kinks.
  for (int round = 0; round < 4; ++round) {
    for (size_t k = 0; k < m; ++k) {
      gsl_vector_set(x, k, start[k]);
      gsl_vector_set(step, k, std::max(1e-12, scale * (cu.hi[k] - cu.lo[k])));
    }
    gsl_multimin_fminimizer_set(s, &fn, x, step);
    for (int it = 0; it < max_iters; ++it) {
      ++res.iterations;
      if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
      const double size = gsl_multimin_fminimizer_size(s);
      if (gsl_multimin_test_size(size, 1e-10) == GSL_SUCCESS) break;
    }
    if (!ctx.best_point.empty()) start = ctx.best_point;
    scale *= 0.1;
  }
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(step);
  gsl_vector_free(x);
  res.point = ctx.best_point.empty() ? start : ctx.best_point;
  res.margin = cu.margin(res.point.data());
  return res;
}

}  // namespace

std::vector<double> Underapprox::values(const std::vector<double>& a) const {
  std::vector<double> out;
  for (const auto& e : entries) {
    double v = INFINITY;
    for (const auto& pc : e.pieces) {
      if (in_cell(pc.cell, a)) {
        v = pc.p.evaluate(a);
        break;
      }
    }
    out.push_back(v);
  }
  return out;
}

double Underapprox::margin(const std::vector<double>& a) const {
  double best = -INFINITY;
  for (double v : values(a)) best = std::max(best, v);
  return best;
}

std::vector<std::vector<double>> latin_hypercube(const Box& box, int count, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const size_t m = box.size();
  std::vector<std::vector<double>> pts(count, std::vector<double>(m));
  std::vector<int> perm(count);
  for (size_t k = 0; k < m; ++k) {
    for (int i = 0; i < count; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    const double lo = rational_to_double(box[k].lo);
    const double hi = rational_to_double(box[k].hi);
    for (int i = 0; i < count; ++i) {
      pts[i][k] = lo + (hi - lo) * (perm[i] + unit(rng)) / count;
    }
  }
  return pts;
}

std::optional<Candidate> find_assignment(const Underapprox& u, const ExtractOptions& options) {
  if (options.starts < 0 || options.max_grid_points < 0) {
    throw UsageError("extraction budget must be positive");
  }
  gsl_set_error_handler_off();
  const CompiledUnderapprox cu(u);
  const size_t m = cu.lo.size();
  const auto starts = latin_hypercube(u.param_box, options.starts, options.seed);
  std::vector<StartResult> results(starts.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next++; i < starts.size(); i = next++) {
      results[i] = refine(cu, starts[i], options.max_simplex_iters);
    }
  };
  const int nthreads = std::max(1, std::min<int>(options.threads, static_cast<int>(starts.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  Candidate cand;
  cand.trace.starts_run = static_cast<int>(starts.size());
  for (const auto& r : results) cand.trace.iterations += r.iterations;
  for (size_t i = 0; i < results.size(); ++i) {
    if (results[i].margin <= -options.delta) {
      cand.a0 = results[i].point;
      cand.margin = results[i].margin;
      cand.trace.method = "nelder-mead";
      cand.trace.start_index = static_cast<int>(i);
      return cand;
    }
  }

  // Grid fallback.
  int per_axis = 33;
  if (m > 0) {
    while (per_axis > 2 && std::pow(static_cast<double>(per_axis), static_cast<double>(m)) >
                               static_cast<double>(options.max_grid_points)) {
      --per_axis;
    }
  }
  long long total = 1;
  for (size_t k = 0; k < m; ++k) total *= per_axis;
  if (total > options.max_grid_points) return std::nullopt;
  std::vector<double> a(m), best_a;
  double best = INFINITY;
  for (long long idx = 0; idx < total; ++idx) {
    long long r = idx;
    for (size_t k = 0; k < m; ++k) {
      const int i = static_cast<int>(r % per_axis);
      r /= per_axis;
      a[k] = cu.lo[k] + (cu.hi[k] - cu.lo[k]) * i / (per_axis - 1);
    }
    const double v = cu.margin(a.data());
    if (v < best) {
      best = v;
      best_a = a;
    }
  }
  cand.trace.grid_points = total;
  if (best <= -options.delta) {
    cand.a0 = best_a;
    cand.margin = best;
    cand.trace.method = "grid";
    return cand;
  }
  return std::nullopt;
}

Rational exact_margin(const Underapprox& u, const std::vector<double>& a, double quantum) {
  const Rational q = rational_from_double(quantum);
  std::vector<Rational> point;
  for (double v : a) point.push_back(rational_from_double(v));
  std::optional<Rational> best;
  for (const auto& e : u.entries) {
    for (const auto& pc : e.pieces) {
      if (!in_cell(pc.cell, a)) continue;
      RatPolynomial p(pc.p.universe());
      for (const auto& [mono, c] : pc.p.terms()) {
        const Rational scaled = rational_from_double(c) / q;
        mpz_class n = scaled.get_num();
        mpz_class d = scaled.get_den();
        mpz_class rounded;
        mpz_fdiv_q(rounded.get_mpz_t(), mpz_class(2 * n + d).get_mpz_t(),
                   mpz_class(2 * d).get_mpz_t());
        p.add_term(mono, Rational(rounded) * q);
      }
      const Rational v = p.evaluate(point);
      if (!best || v > *best) best = v;
      break;
    }
  }
  if (!best) throw UsageError("no entries to evaluate");
  return *best;
}

}  // namespace semialg
