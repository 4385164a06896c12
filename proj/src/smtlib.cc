#include "semialg/smtlib.h"

#include <cctype>

#include "semialg/errors.h"

namespace semialg {

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> all() {
    std::vector<SExpr> out;
    skip();
    while (pos_ < text_.size()) {
      out.push_back(next());
      skip();
    }
    return out;
  }

 private:
  void skip() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  SExpr next() {
    skip();
    if (pos_ >= text_.size()) throw UsageError("unexpected end of s-expression");
    const char c = text_[pos_];
    if (c == ')') throw UsageError("unbalanced ')' at offset " + std::to_string(pos_));
    if (c == '(') {
      ++pos_;
      SExpr e;
      e.is_atom = false;
      for (;;) {
        skip();
        if (pos_ >= text_.size()) throw UsageError("missing ')'");
        if (text_[pos_] == ')') {
          ++pos_;
          return e;
        }
        e.items.push_back(next());
      }
    }
    SExpr e;
    const size_t start = pos_;
    if (c == '"' || c == '|') {
      ++pos_;
      while (pos_ < text_.size() && text_[pos_] != c) ++pos_;
      if (pos_ >= text_.size()) throw UsageError("unterminated literal");
      ++pos_;
      e.atom = std::string(text_.substr(start, pos_ - start));
      if (c == '|') e.atom = e.atom.substr(1, e.atom.size() - 2);
      return e;
    }
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != ';') {
      ++pos_;
    }
    e.atom = std::string(text_.substr(start, pos_ - start));
    return e;
  }

  std::string_view text_;
  size_t pos_ = 0;
};

bool is_numeral(const std::string& s) {
  if (s.empty()) return false;
  bool dot = false;
  for (char c : s) {
    if (c == '.') {
      if (dot) return false;
      dot = true;
    } else if (!std::isdigit(static_cast<unsigned char>(c))) {
      return false;
    }
  }
  return true;
}

const std::string& head(const SExpr& e) {
  static const std::string kEmpty;
  if (e.is_atom || e.items.empty() || !e.items[0].is_atom) return kEmpty;
  return e.items[0].atom;
}

}  // namespace

std::string SExpr::to_string() const {
  if (is_atom) return atom;
  std::string out = "(";
  for (size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ' ';
    out += items[i].to_string();
  }
  return out + ")";
}

std::vector<SExpr> parse_sexprs(std::string_view text) { return Reader(text).all(); }

Rational smt_value(const SExpr& e) {
  if (e.is_atom) {
    if (!is_numeral(e.atom)) throw UsageError("not a numeral: '" + e.atom + "'");
    return parse_rational(e.atom);
  }
  const std::string& op = head(e);
  const size_t n = e.items.size();
  if (n < 2) throw UsageError("malformed term " + e.to_string());
  if (op == "/") {
    if (n != 3) throw UsageError("malformed division " + e.to_string());
    const Rational den = smt_value(e.items[2]);
    if (den == 0) throw UsageError("division by zero in " + e.to_string());
    return smt_value(e.items[1]) / den;
  }
  if (op == "-" && n == 2) return -smt_value(e.items[1]);
  if (op != "-" && op != "+" && op != "*") throw UsageError("unsupported operator '" + op + "'");
  Rational acc = smt_value(e.items[1]);
  for (size_t i = 2; i < n; ++i) {
    const Rational v = smt_value(e.items[i]);
    if (op == "-") {
      acc -= v;
    } else if (op == "+") {
      acc += v;
    } else {
      acc *= v;
    }
  }
  return acc;
}

RatPolynomial smt_polynomial(const SExpr& e, const UniversePtr& universe) {
  if (!e.is_atom && head(e) == "/") return RatPolynomial(universe, smt_value(e));
  if (!e.is_atom && head(e) == "^") {
    if (e.items.size() != 3) throw UsageError("malformed power " + e.to_string());
    const Rational k = smt_value(e.items[2]);
    if (k < 0 || k.get_den() != 1) throw UsageError("non-natural exponent " + e.to_string());
    return smt_polynomial(e.items[1], universe).pow(static_cast<int>(k.get_num().get_si()));
  }
  if (!e.is_atom) {
    // Nested divisions only occur inside numerals.
    const std::string& op = head(e);
    if (op != "-" && op != "+" && op != "*") throw UsageError("unsupported operator '" + op + "'");
    std::vector<RatPolynomial> args;
    for (size_t i = 1; i < e.items.size(); ++i) args.push_back(smt_polynomial(e.items[i], universe));
    if (args.empty()) throw UsageError("malformed term " + e.to_string());
    RatPolynomial acc = args[0];
    if (op == "-" && args.size() == 1) return -acc;
    for (size_t i = 1; i < args.size(); ++i) {
      if (op == "-") acc -= args[i];
      if (op == "+") acc += args[i];
      if (op == "*") acc *= args[i];
    }
    return acc;
  }
  if (is_numeral(e.atom)) return RatPolynomial(universe, parse_rational(e.atom));
  return RatPolynomial::variable(universe, e.atom);
}

ParsedScript parse_script(std::string_view text) {
  ParsedScript script;
  std::vector<std::string> names;
  std::vector<SExpr> asserted;
  for (const SExpr& cmd : parse_sexprs(text)) {
    const std::string& op = head(cmd);
    if (op == "set-logic" && cmd.items.size() == 2) {
      script.logic = cmd.items[1].atom;
    } else if (op == "declare-const" && cmd.items.size() == 3) {
      names.push_back(cmd.items[1].atom);
    } else if (op == "declare-fun" && cmd.items.size() == 4) {
      if (!cmd.items[2].is_atom && !cmd.items[2].items.empty()) {
        throw UsageError("function symbols with arguments are not supported");
      }
      names.push_back(cmd.items[1].atom);
    } else if (op == "assert" && cmd.items.size() == 2) {
      asserted.push_back(cmd.items[1]);
    } else if (op == "check-sat") {
      script.check_sat = true;
    }
  }
  script.universe = make_universe(names);
  std::vector<std::pair<SExpr, bool>> stack;
  for (auto it = asserted.rbegin(); it != asserted.rend(); ++it) stack.push_back({*it, false});
  while (!stack.empty()) {
    auto [e, negated] = stack.back();
    stack.pop_back();
    const std::string& op = head(e);
    if (op == "and" && !negated) {
      for (size_t i = e.items.size(); i-- > 1;) stack.push_back({e.items[i], false});
      continue;
    }
    if (op == "not" && e.items.size() == 2) {
      stack.push_back({e.items[1], !negated});
      continue;
    }
    if ((op == "<=" || op == "<" || op == ">=" || op == ">" || op == "=") && e.items.size() == 3) {
      SmtAtom atom;
      atom.relation = op;
      atom.negated = negated;
      atom.difference = smt_polynomial(e.items[1], script.universe) -
                        smt_polynomial(e.items[2], script.universe);
      script.atoms.push_back(std::move(atom));
      continue;
    }
    throw UsageError("unsupported assertion " + e.to_string());
  }
  return script;
}

SmtModel parse_model(std::string_view output) {
  SmtModel model;
  std::vector<SExpr> exprs;
  try {
    exprs = parse_sexprs(output);
  } catch (const UsageError&) {
    return model;
  }
  std::vector<const SExpr*> stack;
  for (const auto& e : exprs) stack.push_back(&e);
  while (!stack.empty()) {
    const SExpr* e = stack.back();
    stack.pop_back();
    if (e->is_atom) continue;
    if (head(*e) == "define-fun" && e->items.size() == 5 && !e->items[2].is_atom &&
        e->items[2].items.empty()) {
      const std::string& name = e->items[1].atom;
      try {
        model.values[name] = smt_value(e->items[4]);
      } catch (const UsageError&) {
        model.unparsed.push_back(name);
      }
      continue;
    }
    for (const auto& item : e->items) stack.push_back(&item);
  }
  return model;
}

}  // namespace semialg
