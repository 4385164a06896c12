#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semialg/poly.h"

namespace semialg {

struct Interval {
  Rational lo;
  Rational hi;

  bool operator==(const Interval& other) const {
    return lo == other.lo && hi == other.hi;
  }
};

/// Per-variable closed intervals.
using Box = std::vector<Interval>;

/// Uniform box with every coordinate in [lo, hi].
Box uniform_box(int size, const Rational& lo, const Rational& hi);

/// Parses "[lo,hi] x [lo,hi] ...". A single interval is broadcast to
/// `size` coordinates when `size` > 0.
Box parse_box(std::string_view text, int size = 0);

std::string box_to_string(const Box& box);

/// Parses a polynomial expression over the variables of `universe`.
/// Throws ParseError.
RatPolynomial parse_polynomial(std::string_view text, const UniversePtr& universe);

/// One guarded command. Guards are c(x) <= 0 over the program variables;
/// `update` holds one polynomial per program variable over the state
/// universe (program variables then disturbances), already composed into a
/// simultaneous map.
struct Branch {
  std::vector<RatPolynomial> guards;
  std::vector<RatPolynomial> update;

  bool operator==(const Branch& other) const {
    return guards == other.guards && update == other.update;
  }
};

struct GuardedLoop {
  /// Program variables only.
  UniversePtr vars;
  /// Program variables followed by disturbance variables.
  UniversePtr state;
  Box var_box;
  Box disturbance_box;
  std::vector<RatPolynomial> pre;
  std::vector<RatPolynomial> post;
  std::vector<Branch> branches;
  /// Explicit exit condition. Unset means the loop exits when every guard
  /// fails; an empty list means it may exit at any iteration.
  std::optional<std::vector<RatPolynomial>> exit;

  int num_vars() const { return vars->size(); }
  int num_disturbances() const { return state->size() - vars->size(); }

  bool operator==(const GuardedLoop& other) const;
};

struct TemplateSpec {
  /// Parameter names a.
  UniversePtr params;
  /// Conjuncts I_r(a, x) <= 0 over params followed by program variables.
  UniversePtr universe;
  std::vector<RatPolynomial> conjuncts;
  Box param_box;

  int num_params() const { return params->size(); }
};

/// Parses the guarded-loop language. Throws ParseError.
GuardedLoop parse_program(std::string_view text);

/// Parses template conjuncts separated by "&&" or ";". Each conjunct is a
/// polynomial read as "<= 0" or a comparison. Identifiers that are not
/// program variables become parameters in order of first appearance.
/// When `param_box` is unset every parameter ranges over [-5, 5].
TemplateSpec parse_template(std::string_view text, const GuardedLoop& loop,
                            const std::optional<Box>& param_box = std::nullopt);

/// Template with one parameter per monomial of degree <= `degree` in the
/// program variables, named c0, c1, ...
TemplateSpec auto_template(const GuardedLoop& loop, int degree,
                           const std::optional<Box>& param_box = std::nullopt);

/// Source text that parses back to an equal loop.
std::string to_source(const GuardedLoop& loop);

std::string template_to_string(const TemplateSpec& tmpl);

struct Diagnostic {
  enum class Severity { kWarning, kError };
  Severity severity;
  std::string message;
};

std::vector<Diagnostic> validate(const GuardedLoop& loop, const TemplateSpec& tmpl);

/// Names accepted by corpus().
std::vector<std::string> corpus_names();

/// Built-in benchmark programs with their templates.
std::pair<GuardedLoop, TemplateSpec> corpus(std::string_view name);

/// Source text of a corpus program.
std::string corpus_source(std::string_view name);

}  // namespace semialg
