#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "semialg/poly.h"

namespace semialg {

struct SExpr {
  bool is_atom = true;
  std::string atom;
  std::vector<SExpr> items;

  std::string to_string() const;
};

/// Every top-level s-expression in `text`. `;` starts a comment. Throws
/// UsageError on unbalanced parentheses.
std::vector<SExpr> parse_sexprs(std::string_view text);

/// Value of a numeral term built from integers, decimals, -, +, * and /.
Rational smt_value(const SExpr& e);

/// Polynomial of a term over `universe`; symbols must be declared there.
RatPolynomial smt_polynomial(const SExpr& e, const UniversePtr& universe);

struct SmtAtom {
  /// One of <=, <, >=, >, =.
  std::string relation;
  bool negated = false;
  /// Left side minus right side.
  RatPolynomial difference;
};

struct ParsedScript {
  std::string logic;
  UniversePtr universe;
  /// Conjunction of the asserted atoms; `and` is flattened.
  std::vector<SmtAtom> atoms;
  bool check_sat = false;
};

/// Reads a QF_NRA script of the form produced by emit_smtlib.
ParsedScript parse_script(std::string_view text);

struct SmtModel {
  std::map<std::string, Rational> values;
  /// Names whose value was not a rational numeral (for example root-obj).
  std::vector<std::string> unparsed;
};

/// Zero-arity define-fun entries of a solver's get-model output.
SmtModel parse_model(std::string_view output);

}  // namespace semialg
