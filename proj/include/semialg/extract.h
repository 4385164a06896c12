#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semialg/poly.h"
#include "semialg/program.h"

namespace semialg {

/// p of one condition restricted to a parameter cell.
struct UnderapproxPiece {
  Box cell;
  FloatPolynomial p;
};

struct UnderapproxEntry {
  std::string condition_id;
  /// Pieces covering the parameter box; at a point the first containing
  /// piece applies.
  std::vector<UnderapproxPiece> pieces;
};

/// Sub-level sets {a : p_i(a) <= 0} of one relaxation degree. All p live in
/// a universe holding only the parameters.
struct Underapprox {
  int degree = 0;
  UniversePtr params;
  Box param_box;
  std::vector<UnderapproxEntry> entries;

  /// p_i(a) per entry.
  std::vector<double> values(const std::vector<double>& a) const;
  /// max_i p_i(a); -infinity without entries.
  double margin(const std::vector<double>& a) const;
};

struct ExtractOptions {
  uint64_t seed = 1;
  int starts = 64;
  /// Accept a when max_i p_i(a) <= -delta.
  double delta = 1e-6;
  int max_simplex_iters = 2000;
  /// Grid fallback: at most 33 points per axis and this many points total.
  long long max_grid_points = 1000000;
  int threads = 1;
};

struct ExtractTrace {
  std::string method;
  int start_index = -1;
  int starts_run = 0;
  long long iterations = 0;
  long long grid_points = 0;
};

struct Candidate {
  std::vector<double> a0;
  double margin = 0;
  ExtractTrace trace;
};

/// Minimizes max_i p_i over the parameter box from seeded Latin-hypercube
/// starts with Nelder-Mead refinement, then falls back to a grid. Returns the
/// converged point of the lowest-index start that reaches -delta.
std::optional<Candidate> find_assignment(const Underapprox& u, const ExtractOptions& options);

/// Seeded Latin-hypercube sample of `count` points in `box`.
std::vector<std::vector<double>> latin_hypercube(const Box& box, int count, uint64_t seed);

/// max_i p_i(a) in exact arithmetic at the exact value of `a`, with every
/// coefficient rounded to the nearest multiple of `quantum`.
Rational exact_margin(const Underapprox& u, const std::vector<double>& a,
                      double quantum = 1e-12);

}  // namespace semialg
