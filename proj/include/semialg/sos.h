#pragma once

#include <map>
#include <string>
#include <vector>

#include "semialg/conditions.h"
#include "semialg/poly.h"
#include "semialg/program.h"

namespace semialg {

/// Normalized moments gamma_alpha = (1/vol(box)) * integral of v^alpha over
/// the box, for all alpha of total degree <= max_degree. Monomials are over
/// a universe with one variable per box coordinate.
struct MomentVector {
  std::map<Monomial, Rational, GradedLess> values;

  Rational exact(const Monomial& alpha) const;
  double value(const Monomial& alpha) const;
};

/// Closed form per coordinate: (hi^(k+1) - lo^(k+1)) / ((k+1)(hi - lo)).
Rational box_moment(const Box& box, const std::vector<int>& alpha);

MomentVector moments(const Box& box, int max_degree);

/// v = center + half * v' for every universe variable. Variables that are not
/// scaled have center 0 and half 1.
struct AffineMap {
  std::vector<Rational> center;
  std::vector<Rational> half;

  static AffineMap identity(int size);

  /// q(v') = p(center + half * v').
  RatPolynomial to_scaled(const RatPolynomial& p) const;
  /// p(v) = q((v - center) / half).
  RatPolynomial to_original(const RatPolynomial& q) const;
  FloatPolynomial to_original(const FloatPolynomial& q) const;

  std::vector<double> point_to_scaled(const std::vector<double>& v) const;
};

/// Maps the parameter box and the quantified box of `cond` onto [-1, 1].
/// Throws UsageError on a degenerate interval.
std::pair<ConditionProblem, AffineMap> scale_to_unit(const ConditionProblem& cond);

/// One unknown SOS polynomial sigma with Gram basis `basis`, multiplied by
/// the known polynomial `multiplier` (nonnegative on the domain).
struct GramSlot {
  std::string label;
  int identity = 0;
  FloatPolynomial multiplier;
  std::vector<Monomial> basis;
};

/// p(a) + offset(a, x) = sum over the identity's slots of sigma * multiplier.
struct SosIdentity {
  std::string label;
  FloatPolynomial offset;
  RatPolynomial exact_offset;
  int half_degree = 0;
};

struct RelaxationOptions {
  /// Relaxation order (>= 1), counted from the smallest order that matches
  /// the degree of each identity.
  int degree = 1;
  /// Degree of p; 0 selects max(2 * degree, degree of l in a).
  int p_degree = 0;
  /// Map all boxes onto [-1, 1] before building.
  bool scale = true;
  /// Append the redundant ball constraints R^2 - |v|^2 >= 0.
  bool balls = true;
  /// Explicit Gram half-degree for identity (A); 0 derives it from `degree`.
  int absolute_half_degree = 0;
};

struct SosProgram {
  std::string condition_id;
  /// Universe in which the identities are written (scaled coordinates when
  /// scaling is on; names are unchanged).
  UniversePtr universe;
  std::vector<int> params;
  std::vector<int> quantified;
  int degree = 1;
  int p_degree = 2;
  std::vector<Monomial> p_basis;
  std::vector<double> objective;
  std::vector<SosIdentity> identities;
  std::vector<GramSlot> slots;
  AffineMap back_map;
  /// Box of every universe variable in the coordinates of the identities;
  /// used to bound residual effects.
  std::vector<Interval> coordinate_box;
  Rational big_m = 10;
};

SosProgram build_relaxation(const ConditionProblem& cond, const RelaxationOptions& options);

/// Splits the parameter box into `cells_per_dim` equal parts per coordinate.
std::vector<Box> partition_box(const Box& box, int cells_per_dim);

/// The problem restricted to one parameter cell.
ConditionProblem restrict_params(const ConditionProblem& cond, const Box& cell);

}  // namespace semialg
