#include "semialg/program.h"

#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "semialg/errors.h"

namespace semialg {

namespace {

enum class Tok { kIdent, kNumber, kPunct, kEnd };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> tokens;
  int line = 1;
  int column = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
      ++i;
    }
  };
  static const char* kTwoChar[] = {":=", "<=", ">=", "&&"};
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const int tl = line;
    const int tc = column;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      tokens.push_back({Tok::kIdent, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      tokens.push_back({Tok::kNumber, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    bool matched = false;
    for (const char* two : kTwoChar) {
      if (src.substr(i, 2) == two) {
        tokens.push_back({Tok::kPunct, two, tl, tc});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("[],;:(){}+-*/^<>").find(c) != std::string_view::npos) {
      tokens.push_back({Tok::kPunct, std::string(1, c), tl, tc});
      advance(1);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", tl, tc);
  }
  tokens.push_back({Tok::kEnd, "", line, column});
  return tokens;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(int ahead = 0) const {
    size_t k = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[k];
  }
  bool at_punct(std::string_view p, int ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::kPunct && t.text == p;
  }
  bool at_ident(std::string_view name, int ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::kIdent && t.text == name;
  }
  bool at_end() const { return peek().kind == Tok::kEnd; }

  [[noreturn]] void fail(const std::string& message, const Token& at) const {
    throw ParseError(message, at.line, at.column);
  }
  [[noreturn]] void fail(const std::string& message) const { fail(message, peek()); }

  Token next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }

  void expect_punct(std::string_view p) {
    if (!at_punct(p)) {
      fail("expected '" + std::string(p) + "' but found '" + describe(peek()) + "'");
    }
    next();
  }
  void expect_keyword(std::string_view k) {
    if (!at_ident(k)) {
      fail("expected '" + std::string(k) + "' but found '" + describe(peek()) + "'");
    }
    next();
  }
  std::string expect_ident() {
    if (peek().kind != Tok::kIdent) fail("expected identifier but found '" + describe(peek()) + "'");
    return next().text;
  }

  static std::string describe(const Token& t) {
    return t.kind == Tok::kEnd ? "end of input" : t.text;
  }

  Rational parse_signed_number() {
    bool negative = false;
    if (at_punct("-") || at_punct("+")) negative = next().text == "-";
    if (peek().kind != Tok::kNumber) fail("expected number");
    Rational value = parse_rational(next().text);
    if (at_punct("/")) {
      next();
      if (peek().kind != Tok::kNumber) fail("expected denominator");
      const Token den_tok = next();
      Rational den = parse_rational(den_tok.text);
      if (sgn(den) == 0) fail("zero denominator", den_tok);
      value /= den;
    }
    return negative ? Rational(-value) : value;
  }

  Interval parse_interval() {
    const Token start = peek();
    expect_punct("[");
    Rational lo = parse_signed_number();
    expect_punct(",");
    Rational hi = parse_signed_number();
    expect_punct("]");
    return {lo, hi};
  }

  Box parse_box() {
    Box box{parse_interval()};
    while (at_ident("x") && at_punct("[", 1)) {
      next();
      box.push_back(parse_interval());
    }
    return box;
  }

  // Polynomial expressions over `universe`. `resolve` maps an identifier
  // to a variable index or reports failure.
  using Resolver = std::function<std::optional<int>(const std::string&)>;

  RatPolynomial parse_expr(const UniversePtr& u, const Resolver& resolve) {
    RatPolynomial result = parse_term(u, resolve);
    while (at_punct("+") || at_punct("-")) {
      const bool minus = next().text == "-";
      RatPolynomial rhs = parse_term(u, resolve);
      if (minus) {
        result -= rhs;
      } else {
        result += rhs;
      }
    }
    return result;
  }

  RatPolynomial parse_term(const UniversePtr& u, const Resolver& resolve) {
    RatPolynomial result = parse_unary(u, resolve);
    while (at_punct("*") || at_punct("/")) {
      const Token op = next();
      RatPolynomial rhs = parse_unary(u, resolve);
      if (op.text == "*") {
        result *= rhs;
      } else {
        if (!rhs.is_constant() || rhs.is_zero()) {
          fail(rhs.is_zero() ? "division by zero"
                             : "non-polynomial expression (division by non-constant)",
               op);
        }
        result *= Rational(1 / rhs.constant_term());
      }
    }
    return result;
  }

  RatPolynomial parse_unary(const UniversePtr& u, const Resolver& resolve) {
    if (at_punct("-")) {
      next();
      return -parse_unary(u, resolve);
    }
    if (at_punct("+")) {
      next();
      return parse_unary(u, resolve);
    }
    return parse_power(u, resolve);
  }

  RatPolynomial parse_power(const UniversePtr& u, const Resolver& resolve) {
    RatPolynomial base = parse_primary(u, resolve);
    if (at_punct("^")) {
      next();
      const Token t = peek();
      if (t.kind != Tok::kNumber || t.text.find_first_not_of("0123456789") != std::string::npos) {
        fail("exponent must be a non-negative integer literal", t);
      }
      next();
      const long e = std::stol(t.text);
      if (e > 64) fail("exponent too large", t);
      return base.pow(static_cast<int>(e));
    }
    return base;
  }

  RatPolynomial parse_primary(const UniversePtr& u, const Resolver& resolve) {
    const Token t = peek();
    if (t.kind == Tok::kNumber) {
      next();
      return RatPolynomial(u, parse_rational(t.text));
    }
    if (t.kind == Tok::kIdent) {
      next();
      auto index = resolve(t.text);
      if (!index) fail("unknown variable '" + t.text + "'", t);
      return RatPolynomial::variable(u, *index);
    }
    if (at_punct("(")) {
      next();
      RatPolynomial inner = parse_expr(u, resolve);
      expect_punct(")");
      return inner;
    }
    fail("expected expression but found '" + describe(t) + "'");
  }

  // cmp := expr op expr, normalized to a single polynomial read "<= 0".
  RatPolynomial parse_cmp(const UniversePtr& u, const Resolver& resolve) {
    RatPolynomial lhs = parse_expr(u, resolve);
    const Token op = peek();
    if (!(at_punct("<=") || at_punct(">=") || at_punct("<") || at_punct(">"))) {
      fail("expected comparison operator but found '" + describe(op) + "'");
    }
    next();
    RatPolynomial rhs = parse_expr(u, resolve);
    if (op.text == "<=" || op.text == "<") return lhs - rhs;
    return rhs - lhs;
  }

  std::vector<RatPolynomial> parse_conj(const UniversePtr& u, const Resolver& resolve) {
    std::vector<RatPolynomial> result;
    auto push = [&](RatPolynomial p) {
      if (p.is_constant() && sgn(p.constant_term()) <= 0) return;  // trivially true
      result.push_back(std::move(p));
    };
    push(parse_cmp(u, resolve));
    while (at_punct("&&")) {
      next();
      push(parse_cmp(u, resolve));
    }
    return result;
  }

  size_t pos_ = 0;
  std::vector<Token> tokens_;
};

Parser::Resolver universe_resolver(const UniversePtr& u) {
  return [u](const std::string& name) { return u->index_of(name); };
}

bool is_reserved(const std::string& name) {
  static const std::set<std::string> kReserved = {"vars", "in", "pre", "post", "branch",
                                                  "par", "dist", "exit"};
  return kReserved.count(name) > 0;
}

}  // namespace

Box uniform_box(int size, const Rational& lo, const Rational& hi) {
  return Box(size, Interval{lo, hi});
}

Box parse_box(std::string_view text, int size) {
  Parser p(tokenize(text));
  Box box = p.parse_box();
  if (!p.at_end()) p.fail("trailing input after box");
  if (size > 0 && box.size() == 1 && size > 1) box = Box(size, box[0]);
  if (size > 0 && static_cast<int>(box.size()) != size) {
    throw ConfigError("box has " + std::to_string(box.size()) + " intervals, expected " +
                      std::to_string(size));
  }
  return box;
}

RatPolynomial parse_polynomial(std::string_view text, const UniversePtr& universe) {
  Parser p(tokenize(text));
  RatPolynomial result = p.parse_expr(universe, universe_resolver(universe));
  if (!p.at_end()) p.fail("trailing input after polynomial");
  return result;
}

std::string box_to_string(const Box& box) {
  std::string out;
  for (size_t i = 0; i < box.size(); ++i) {
    if (i > 0) out += " x ";
    out += "[" + rational_to_string(box[i].lo) + "," + rational_to_string(box[i].hi) + "]";
  }
  return out;
}

bool GuardedLoop::operator==(const GuardedLoop& other) const {
  return *vars == *other.vars && *state == *other.state && var_box == other.var_box &&
         disturbance_box == other.disturbance_box && pre == other.pre && post == other.post &&
         branches == other.branches && exit == other.exit;
}

GuardedLoop parse_program(std::string_view text) {
  Parser p(tokenize(text));
  GuardedLoop loop;

  p.expect_keyword("vars");
  std::vector<std::string> names;
  while (p.peek().kind == Tok::kIdent && !p.at_ident("in")) {
    const Token t = p.peek();
    std::string name = p.expect_ident();
    if (is_reserved(name)) p.fail("reserved word '" + name + "' used as a variable", t);
    for (const auto& n : names) {
      if (n == name) p.fail("duplicate variable '" + name + "'", t);
    }
    names.push_back(name);
  }
  if (names.empty()) p.fail("expected at least one variable");
  p.expect_keyword("in");
  const Token box_tok = p.peek();
  loop.var_box = p.parse_box();
  if (loop.var_box.size() == 1 && names.size() > 1) {
    loop.var_box = Box(names.size(), loop.var_box[0]);
  }
  if (loop.var_box.size() != names.size()) {
    p.fail("variable box has " + std::to_string(loop.var_box.size()) + " intervals for " +
               std::to_string(names.size()) + " variables",
           box_tok);
  }
  p.expect_punct(";");
  loop.vars = make_universe(names);

  std::vector<std::string> state_names = names;
  if (p.at_ident("dist")) {
    p.next();
    std::vector<std::string> dist;
    while (p.peek().kind == Tok::kIdent && !p.at_ident("in")) {
      const Token t = p.peek();
      std::string name = p.expect_ident();
      for (const auto& n : state_names) {
        if (n == name) p.fail("duplicate variable '" + name + "'", t);
      }
      state_names.push_back(name);
      dist.push_back(name);
    }
    if (dist.empty()) p.fail("expected at least one disturbance variable");
    p.expect_keyword("in");
    const Token dbox_tok = p.peek();
    loop.disturbance_box = p.parse_box();
    if (loop.disturbance_box.size() == 1 && dist.size() > 1) {
      loop.disturbance_box = Box(dist.size(), loop.disturbance_box[0]);
    }
    if (loop.disturbance_box.size() != dist.size()) {
      p.fail("disturbance box size does not match", dbox_tok);
    }
    p.expect_punct(";");
  }
  loop.state = make_universe(state_names);
  const auto vars_resolve = universe_resolver(loop.vars);
  const auto state_resolve = universe_resolver(loop.state);

  p.expect_keyword("pre");
  p.expect_punct(":");
  loop.pre = p.parse_conj(loop.vars, vars_resolve);
  p.expect_punct(";");

  const int n = loop.num_vars();
  while (p.at_ident("branch")) {
    p.next();
    Branch branch;
    p.expect_punct("(");
    if (p.at_punct("*")) {
      p.next();
    } else {
      branch.guards = p.parse_conj(loop.vars, vars_resolve);
    }
    p.expect_punct(")");
    p.expect_punct("{");
    std::vector<RatPolynomial> map;
    for (int i = 0; i < n; ++i) map.push_back(RatPolynomial::variable(loop.state, i));
    auto bindings_of = [&](const std::vector<RatPolynomial>& m) {
      std::map<int, RatPolynomial> b;
      for (int i = 0; i < n; ++i) b.emplace(i, m[i]);
      return b;
    };
    auto parse_assign = [&](const std::vector<RatPolynomial>& before) {
      const Token t = p.peek();
      const std::string target = p.expect_ident();
      auto index = loop.vars->index_of(target);
      if (!index) {
        p.fail(loop.state->index_of(target) ? "cannot assign to disturbance '" + target + "'"
                                            : "unknown variable '" + target + "'",
               t);
      }
      p.expect_punct(":=");
      RatPolynomial rhs = p.parse_expr(loop.state, state_resolve);
      p.expect_punct(";");
      return std::make_pair(*index, rhs.substitute(bindings_of(before)));
    };
    while (!p.at_punct("}")) {
      if (p.at_ident("par") && p.at_punct("{", 1)) {
        p.next();
        p.next();
        std::vector<RatPolynomial> updated = map;
        std::set<int> assigned;
        while (!p.at_punct("}")) {
          const Token t = p.peek();
          auto [index, value] = parse_assign(map);
          if (!assigned.insert(index).second) {
            p.fail("variable assigned twice in par block", t);
          }
          updated[index] = value;
        }
        p.expect_punct("}");
        map = std::move(updated);
      } else {
        if (p.at_end()) p.fail("unterminated branch body");
        auto [index, value] = parse_assign(map);
        map[index] = value;
      }
    }
    p.expect_punct("}");
    branch.update = std::move(map);
    loop.branches.push_back(std::move(branch));
  }
  if (loop.branches.empty()) p.fail("expected at least one branch");

  if (p.at_ident("exit")) {
    p.next();
    p.expect_punct(":");
    if (p.at_punct("*")) {
      p.next();
      loop.exit = std::vector<RatPolynomial>{};
    } else {
      loop.exit = p.parse_conj(loop.vars, vars_resolve);
    }
    p.expect_punct(";");
  }

  p.expect_keyword("post");
  p.expect_punct(":");
  loop.post = p.parse_conj(loop.vars, vars_resolve);
  p.expect_punct(";");
  if (!p.at_end()) p.fail("trailing input after program");
  return loop;
}

TemplateSpec parse_template(std::string_view text, const GuardedLoop& loop,
                            const std::optional<Box>& param_box) {
  const std::vector<Token> tokens = tokenize(text);
  std::vector<std::string> params;
  for (const Token& t : tokens) {
    if (t.kind != Tok::kIdent) continue;
    if (loop.vars->index_of(t.text)) continue;
    if (loop.state->index_of(t.text)) {
      throw ParseError("template may not mention disturbance '" + t.text + "'", t.line,
                       t.column);
    }
    if (std::find(params.begin(), params.end(), t.text) == params.end()) {
      params.push_back(t.text);
    }
  }
  TemplateSpec tmpl;
  tmpl.params = make_universe(params);
  std::vector<std::string> joint = params;
  for (const auto& name : loop.vars->names()) joint.push_back(name);
  tmpl.universe = make_universe(joint);
  const auto resolve = universe_resolver(tmpl.universe);

  Parser p(tokens);
  while (!p.at_end()) {
    RatPolynomial lhs = p.parse_expr(tmpl.universe, resolve);
    if (p.at_punct("<=") || p.at_punct(">=") || p.at_punct("<") || p.at_punct(">")) {
      const bool le = p.at_punct("<=") || p.at_punct("<");
      p.next();
      RatPolynomial rhs = p.parse_expr(tmpl.universe, resolve);
      tmpl.conjuncts.push_back(le ? lhs - rhs : rhs - lhs);
    } else {
      tmpl.conjuncts.push_back(lhs);
    }
    if (p.at_punct("&&") || p.at_punct(";")) {
      p.next();
    } else if (!p.at_end()) {
      p.fail("expected '&&' or ';' between template conjuncts");
    }
  }
  if (tmpl.conjuncts.empty()) throw ParseError("empty template", 1, 1);
  if (param_box) {
    tmpl.param_box = *param_box;
    if (tmpl.param_box.size() == 1 && params.size() > 1) {
      tmpl.param_box = Box(params.size(), tmpl.param_box[0]);
    }
  } else {
    tmpl.param_box = uniform_box(static_cast<int>(params.size()), -5, 5);
  }
  return tmpl;
}

TemplateSpec auto_template(const GuardedLoop& loop, int degree,
                           const std::optional<Box>& param_box) {
  const int n = loop.num_vars();
  std::vector<int> vars(n);
  for (int i = 0; i < n; ++i) vars[i] = i;
  const std::vector<Monomial> basis = monomial_basis(*loop.vars, vars, degree);
  std::vector<std::string> params;
  for (size_t i = 0; i < basis.size(); ++i) params.push_back("c" + std::to_string(i));
  TemplateSpec tmpl;
  tmpl.params = make_universe(params);
  std::vector<std::string> joint = params;
  for (const auto& name : loop.vars->names()) joint.push_back(name);
  tmpl.universe = make_universe(joint);
  const int m = static_cast<int>(params.size());
  RatPolynomial conj(tmpl.universe);
  for (size_t i = 0; i < basis.size(); ++i) {
    std::vector<int> e(m + n, 0);
    e[i] = 1;
    for (int v = 0; v < n; ++v) e[m + v] = basis[i][v];
    conj.add_term(Monomial(e), Rational(1));
  }
  tmpl.conjuncts.push_back(conj);
  tmpl.param_box = param_box ? *param_box : uniform_box(m, -5, 5);
  if (tmpl.param_box.size() == 1 && m > 1) tmpl.param_box = Box(m, tmpl.param_box[0]);
  return tmpl;
}

std::string to_source(const GuardedLoop& loop) {
  std::ostringstream out;
  auto conj = [](const std::vector<RatPolynomial>& cs) {
    if (cs.empty()) return std::string("0 <= 0");
    std::string s;
    for (size_t i = 0; i < cs.size(); ++i) {
      if (i > 0) s += " && ";
      s += cs[i].to_string() + " <= 0";
    }
    return s;
  };
  out << "vars";
  for (const auto& name : loop.vars->names()) out << " " << name;
  out << " in " << box_to_string(loop.var_box) << ";\n";
  if (loop.num_disturbances() > 0) {
    out << "dist";
    for (int i = loop.num_vars(); i < loop.state->size(); ++i) out << " " << loop.state->name(i);
    out << " in " << box_to_string(loop.disturbance_box) << ";\n";
  }
  out << "pre: " << conj(loop.pre) << ";\n";
  for (const Branch& b : loop.branches) {
    out << "branch (" << (b.guards.empty() ? std::string("*") : conj(b.guards)) << ") {\n";
    out << "  par {\n";
    for (int i = 0; i < loop.num_vars(); ++i) {
      out << "    " << loop.vars->name(i) << " := " << b.update[i].to_string() << ";\n";
    }
    out << "  }\n}\n";
  }
  if (loop.exit) {
    out << "exit: " << (loop.exit->empty() ? std::string("*") : conj(*loop.exit)) << ";\n";
  }
  out << "post: " << conj(loop.post) << ";\n";
  return out.str();
}

std::string template_to_string(const TemplateSpec& tmpl) {
  std::string s;
  for (size_t i = 0; i < tmpl.conjuncts.size(); ++i) {
    if (i > 0) s += " && ";
    s += tmpl.conjuncts[i].to_string() + " <= 0";
  }
  return s;
}

std::vector<Diagnostic> validate(const GuardedLoop& loop, const TemplateSpec& tmpl) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string m) { out.push_back({Diagnostic::Severity::kError, std::move(m)}); };
  auto warn = [&](std::string m) { out.push_back({Diagnostic::Severity::kWarning, std::move(m)}); };
  auto check_box = [&](const Box& box, int expected, const std::string& what) {
    if (static_cast<int>(box.size()) != expected) {
      error(what + " has " + std::to_string(box.size()) + " intervals, expected " +
            std::to_string(expected));
    }
    for (size_t i = 0; i < box.size(); ++i) {
      if (box[i].lo > box[i].hi) {
        error(what + " interval " + std::to_string(i) + " has lo > hi");
      } else if (box[i].hi - box[i].lo > 1000000) {
        warn(what + " interval " + std::to_string(i) + " spans more than 1e6");
      }
    }
  };
  if (!loop.vars || !loop.state) {
    error("loop has no variable universe");
    return out;
  }
  check_box(loop.var_box, loop.num_vars(), "variable box");
  check_box(loop.disturbance_box, loop.num_disturbances(), "disturbance box");
  if (loop.branches.empty()) error("loop has no branches");
  auto check_over = [&](const RatPolynomial& p, const UniversePtr& u, const std::string& what) {
    if (!p.universe() || !(*p.universe() == *u)) error(what + " is not over the expected variables");
  };
  for (const auto& c : loop.pre) check_over(c, loop.vars, "precondition");
  for (const auto& c : loop.post) check_over(c, loop.vars, "postcondition");
  if (loop.exit) {
    for (const auto& c : *loop.exit) check_over(c, loop.vars, "exit condition");
  }
  for (size_t k = 0; k < loop.branches.size(); ++k) {
    const Branch& b = loop.branches[k];
    for (const auto& g : b.guards) check_over(g, loop.vars, "guard of branch " + std::to_string(k));
    if (static_cast<int>(b.update.size()) != loop.num_vars()) {
      error("branch " + std::to_string(k) + " update has the wrong arity");
    }
    for (const auto& u : b.update) check_over(u, loop.state, "update of branch " + std::to_string(k));
  }

  if (!tmpl.params || !tmpl.universe) {
    error("template has no variable universe");
    return out;
  }
  const int m = tmpl.num_params();
  for (int i = 0; i < tmpl.universe->size(); ++i) {
    const std::string& name = tmpl.universe->name(i);
    const bool is_param = i < m && tmpl.params->name(i) == name;
    const bool is_var = loop.vars->index_of(name).has_value() && i >= m;
    if (!is_param && !is_var) error("template mentions undeclared variable '" + name + "'");
  }
  if (tmpl.universe->size() != m + loop.num_vars()) {
    bool reported = false;
    for (const auto& d : out) reported |= d.severity == Diagnostic::Severity::kError;
    if (!reported) error("template universe does not match parameters and program variables");
  }
  if (tmpl.conjuncts.empty()) error("template has no conjuncts");
  for (const auto& c : tmpl.conjuncts) {
    if (!c.universe() || !(*c.universe() == *tmpl.universe)) {
      error("template conjunct is not over the template universe");
    }
  }
  check_box(tmpl.param_box, m, "parameter box");
  return out;
}

}  // namespace semialg
