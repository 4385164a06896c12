#include "semialg/poly.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "semialg/errors.h"

namespace semialg {

namespace {

bool coef_is_zero(const Rational& c) { return sgn(c) == 0; }
bool coef_is_zero(double c) { return c == 0.0; }
bool coef_negative(const Rational& c) { return sgn(c) < 0; }
bool coef_negative(double c) { return std::signbit(c) && c != 0.0; }
Rational coef_abs(const Rational& c) { return abs(c); }
double coef_abs(double c) { return std::fabs(c); }
std::string coef_string(const Rational& c) { return rational_to_string(c); }
std::string coef_string(double c) { return double_to_string(c); }
bool coef_is_one(const Rational& c) { return c == 1; }
bool coef_is_one(double c) { return c == 1.0; }

template <typename T>
T power(const T& base, int exponent) {
  T result = 1;
  for (int i = 0; i < exponent; ++i) result *= base;
  return result;
}

}  // namespace

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) {
    throw UsageError("cannot convert a non-finite double to a rational");
  }
  Rational r(value);
  r.canonicalize();
  return r;
}

double rational_to_double(const Rational& value) {
  double d = value.get_d();  // truncates toward zero
  if (rational_from_double(d) == value) return d;
  const double away = std::nextafter(d, sgn(value) < 0 ? -INFINITY : INFINITY);
  if (!std::isfinite(away)) return d;
  const Rational err_d = abs(value - rational_from_double(d));
  const Rational err_away = abs(value - rational_from_double(away));
  if (err_away < err_d) return away;
  if (err_d < err_away) return d;
  int exp_d = 0;
  const double mant = std::frexp(d, &exp_d);
  const long long bits = static_cast<long long>(std::ldexp(std::fabs(mant), 53));
  return (bits % 2 == 0) ? d : away;
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw UsageError("empty numeral");
  size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') {
    negative = s[pos] == '-';
    ++pos;
  }
  const size_t slash = s.find('/', pos);
  if (slash != std::string::npos) {
    Rational num = parse_rational(s.substr(pos, slash - pos));
    Rational den = parse_rational(s.substr(slash + 1));
    if (sgn(den) == 0) throw UsageError("zero denominator in '" + s + "'");
    Rational r = num / den;
    return negative ? Rational(-r) : r;
  }
  std::string digits;
  int scale = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; pos < s.size(); ++pos) {
    const char c = s[pos];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      any_digit = true;
      if (seen_point) ++scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw UsageError("malformed numeral '" + s + "'");
  long exponent = 0;
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') {
      throw UsageError("malformed numeral '" + s + "'");
    }
    ++pos;
    const std::string rest = s.substr(pos);
    size_t used = 0;
    try {
      exponent = std::stol(rest, &used);
    } catch (const std::exception&) {
      throw UsageError("malformed exponent in '" + s + "'");
    }
    if (used != rest.size()) throw UsageError("malformed numeral '" + s + "'");
  }
  mpz_class mantissa(digits, 10);
  const long shift = exponent - scale;
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
  Rational r = shift >= 0 ? Rational(mantissa * ten_pow) : Rational(mantissa, ten_pow);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

std::string rational_to_string(const Rational& value) {
  return value.get_str(10);
}

std::string double_to_string(double value) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

VarUniverse::VarUniverse(std::vector<std::string> names)
    : names_(std::move(names)) {
  for (size_t i = 0; i < names_.size(); ++i) {
    for (size_t j = 0; j < i; ++j) {
      if (names_[i] == names_[j]) {
        throw UsageError("duplicate variable '" + names_[i] + "'");
      }
    }
  }
}

std::optional<int> VarUniverse::index_of(std::string_view name) const {
  for (size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

UniversePtr make_universe(std::vector<std::string> names) {
  return std::make_shared<const VarUniverse>(std::move(names));
}

Monomial::Monomial(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) throw UsageError("negative exponent in monomial");
  }
}

Monomial Monomial::variable(int num_vars, int index, int power) {
  Monomial m(num_vars);
  m.exponents_.at(index) = power;
  return m;
}

int Monomial::degree() const {
  return std::accumulate(exponents_.begin(), exponents_.end(), 0);
}

int Monomial::degree_in(const std::vector<int>& vars) const {
  int d = 0;
  for (int v : vars) d += exponents_.at(v);
  return d;
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (size() != other.size()) throw UsageError("monomial size mismatch");
  Monomial r = *this;
  for (int i = 0; i < size(); ++i) r.exponents_[i] += other.exponents_[i];
  return r;
}

bool GradedLess::operator()(const Monomial& a, const Monomial& b) const {
  const int da = a.degree();
  const int db = b.degree();
  if (da != db) return da < db;
  return a.exponents() > b.exponents();
}

size_t MonomialHash::operator()(const Monomial& m) const {
  size_t h = 1469598103934665603ull;
  for (int e : m.exponents()) {
    h ^= static_cast<size_t>(e) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

template <typename T>
Polynomial<T>::Polynomial(UniversePtr universe) : universe_(std::move(universe)) {
  if (!universe_) throw UsageError("polynomial needs a universe");
}

template <typename T>
Polynomial<T>::Polynomial(UniversePtr universe, const T& constant)
    : Polynomial(std::move(universe)) {
  add_term(Monomial(universe_->size()), constant);
}

template <typename T>
Polynomial<T> Polynomial<T>::variable(UniversePtr universe, int index) {
  Polynomial p(universe);
  if (index < 0 || index >= universe->size()) {
    throw UsageError("variable index out of range");
  }
  p.add_term(Monomial::variable(universe->size(), index), T(1));
  return p;
}

template <typename T>
Polynomial<T> Polynomial<T>::variable(UniversePtr universe, std::string_view name) {
  auto index = universe->index_of(name);
  if (!index) throw UsageError("unknown variable '" + std::string(name) + "'");
  return variable(universe, *index);
}

template <typename T>
Polynomial<T> Polynomial<T>::term(UniversePtr universe, Monomial monomial,
                                  const T& coefficient) {
  Polynomial p(universe);
  if (monomial.size() != universe->size()) {
    throw UsageError("monomial does not match universe");
  }
  p.add_term(monomial, coefficient);
  return p;
}

template <typename T>
bool Polynomial<T>::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_constant());
}

template <typename T>
T Polynomial<T>::coefficient(const Monomial& monomial) const {
  auto it = terms_.find(monomial);
  return it == terms_.end() ? T(0) : it->second;
}

template <typename T>
T Polynomial<T>::constant_term() const {
  if (!universe_) return T(0);
  return coefficient(Monomial(universe_->size()));
}

template <typename T>
int Polynomial<T>::degree() const {
  if (terms_.empty()) return kZeroDegree;
  return terms_.rbegin()->first.degree();
}

template <typename T>
int Polynomial<T>::degree_in(const std::vector<int>& vars) const {
  if (terms_.empty()) return kZeroDegree;
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree_in(vars));
  return d;
}

template <typename T>
std::vector<int> Polynomial<T>::variables() const {
  std::vector<int> result;
  if (!universe_) return result;
  for (int i = 0; i < universe_->size(); ++i) {
    for (const auto& [m, c] : terms_) {
      if (m[i] > 0) {
        result.push_back(i);
        break;
      }
    }
  }
  return result;
}

template <typename T>
void Polynomial<T>::add_term(const Monomial& monomial, const T& coefficient) {
  if (coef_is_zero(coefficient)) return;
  auto [it, inserted] = terms_.try_emplace(monomial, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (coef_is_zero(it->second)) terms_.erase(it);
  }
}

template <typename T>
bool Polynomial<T>::same_universe(const Polynomial& other) const {
  if (universe_ == other.universe_) return true;
  if (!universe_ || !other.universe_) return false;
  return *universe_ == *other.universe_;
}

template <typename T>
void Polynomial<T>::check_compatible(const Polynomial& other) const {
  if (!same_universe(other)) {
    throw UsageError("polynomials live in different variable universes");
  }
}

template <typename T>
Polynomial<T> Polynomial<T>::operator-() const {
  Polynomial r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

template <typename T>
Polynomial<T>& Polynomial<T>::operator+=(const Polynomial& other) {
  check_compatible(other);
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

template <typename T>
Polynomial<T>& Polynomial<T>::operator-=(const Polynomial& other) {
  check_compatible(other);
  for (const auto& [m, c] : other.terms_) add_term(m, T(-c));
  return *this;
}

template <typename T>
Polynomial<T>& Polynomial<T>::operator*=(const Polynomial& other) {
  check_compatible(other);
  Polynomial result(universe_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : other.terms_) {
      result.add_term(ma * mb, T(ca * cb));
    }
  }
  terms_ = std::move(result.terms_);
  return *this;
}

template <typename T>
Polynomial<T>& Polynomial<T>::operator*=(const T& scalar) {
  if (coef_is_zero(scalar)) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= scalar;
  return *this;
}

template <typename T>
Polynomial<T> Polynomial<T>::pow(int exponent) const {
  if (exponent < 0) throw UsageError("negative polynomial power");
  Polynomial result(universe_, T(1));
  Polynomial base = *this;
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    exponent >>= 1;
    if (exponent > 0) base *= base;
  }
  return result;
}

template <typename T>
T Polynomial<T>::evaluate(const std::vector<T>& point) const {
  if (!universe_ || static_cast<int>(point.size()) != universe_->size()) {
    throw UsageError("evaluation point does not match universe size");
  }
  T total = 0;
  for (const auto& [m, c] : terms_) {
    T value = c;
    for (int i = 0; i < m.size(); ++i) {
      if (m[i] > 0) value *= power(point[i], m[i]);
    }
    total += value;
  }
  return total;
}

template <typename T>
Polynomial<T> Polynomial<T>::substitute(const std::map<int, Polynomial>& bindings,
                                        const UniversePtr& target) const {
  std::vector<std::optional<Polynomial>> images(universe_->size());
  for (int i = 0; i < universe_->size(); ++i) {
    auto it = bindings.find(i);
    if (it != bindings.end()) {
      if (!(it->second.universe() == target ||
            *it->second.universe() == *target)) {
        throw UsageError("substitution image lives in the wrong universe");
      }
      images[i] = it->second;
    }
  }
  Polynomial result(target);
  std::map<std::pair<int, int>, Polynomial> powers;
  auto power_of = [&](int var, int e) -> const Polynomial& {
    auto key = std::make_pair(var, e);
    auto it = powers.find(key);
    if (it != powers.end()) return it->second;
    Polynomial base = images[var] ? *images[var]
                                  : Polynomial::variable(target, universe_->name(var));
    return powers.emplace(key, base.pow(e)).first->second;
  };
  for (const auto& [m, c] : terms_) {
    Polynomial t(target, c);
    for (int i = 0; i < m.size(); ++i) {
      if (m[i] > 0) t *= power_of(i, m[i]);
    }
    result += t;
  }
  return result;
}

template <typename T>
Polynomial<T> Polynomial<T>::substitute(const std::map<int, Polynomial>& bindings) const {
  return substitute(bindings, universe_);
}

template <typename T>
Polynomial<T> Polynomial<T>::partial_evaluate(const std::map<int, T>& values) const {
  Polynomial result(universe_);
  for (const auto& [m, c] : terms_) {
    std::vector<int> e = m.exponents();
    T coefficient = c;
    for (const auto& [var, value] : values) {
      if (e.at(var) > 0) {
        coefficient *= power(value, e[var]);
        e[var] = 0;
      }
    }
    result.add_term(Monomial(std::move(e)), coefficient);
  }
  return result;
}

template <typename T>
Polynomial<T> Polynomial<T>::rebase(const UniversePtr& target) const {
  std::vector<int> map(universe_->size(), -1);
  for (int i = 0; i < universe_->size(); ++i) {
    auto j = target->index_of(universe_->name(i));
    if (j) map[i] = *j;
  }
  Polynomial result(target);
  for (const auto& [m, c] : terms_) {
    std::vector<int> e(target->size(), 0);
    for (int i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      if (map[i] < 0) {
        throw UsageError("variable '" + universe_->name(i) +
                         "' is missing from the target universe");
      }
      e[map[i]] = m[i];
    }
    result.add_term(Monomial(std::move(e)), c);
  }
  return result;
}

template <typename T>
Polynomial<T> Polynomial<T>::pruned(const T& threshold) const {
  Polynomial result(universe_);
  for (const auto& [m, c] : terms_) {
    if (coef_abs(c) > threshold) result.terms_.emplace(m, c);
  }
  return result;
}

template <typename T>
T Polynomial<T>::l1_norm() const {
  T total = 0;
  for (const auto& [m, c] : terms_) total += coef_abs(c);
  return total;
}

template <typename T>
std::string Polynomial<T>::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const Monomial& m = it->first;
    const T& c = it->second;
    const bool negative = coef_negative(c);
    if (first) {
      if (negative) out << "-";
    } else {
      out << (negative ? " - " : " + ");
    }
    first = false;
    const T magnitude = coef_abs(c);
    std::string mono;
    for (int i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += universe_->name(i);
      if (m[i] > 1) mono += "^" + std::to_string(m[i]);
    }
    if (mono.empty()) {
      out << coef_string(magnitude);
    } else if (coef_is_one(magnitude)) {
      out << mono;
    } else {
      out << coef_string(magnitude) << "*" << mono;
    }
  }
  return out.str();
}

template class Polynomial<Rational>;
template class Polynomial<double>;

FloatPolynomial to_float(const RatPolynomial& p) {
  FloatPolynomial r(p.universe());
  for (const auto& [m, c] : p.terms()) r.add_term(m, rational_to_double(c));
  return r;
}

RatPolynomial to_rational(const FloatPolynomial& p) {
  RatPolynomial r(p.universe());
  for (const auto& [m, c] : p.terms()) r.add_term(m, rational_from_double(c));
  return r;
}

double evaluate_float(const RatPolynomial& p, const std::vector<double>& point) {
  return to_float(p).evaluate(point);
}

std::vector<Monomial> monomial_basis(const VarUniverse& universe,
                                     const std::vector<int>& vars,
                                     int max_degree, int min_degree) {
  std::vector<Monomial> result;
  if (max_degree < 0) return result;
  const int n = universe.size();
  std::vector<int> exps(vars.size(), 0);
  // Enumerate per degree in decreasing lexicographic order of (vars) exponents.
  for (int d = std::max(0, min_degree); d <= max_degree; ++d) {
    std::vector<std::vector<int>> level;
    std::vector<int> current(vars.size(), 0);
    auto recurse = [&](auto&& self, size_t k, int remaining) -> void {
      if (k + 1 == vars.size() || vars.empty()) {
        if (vars.empty()) {
          if (remaining == 0) level.push_back(current);
          return;
        }
        current[k] = remaining;
        level.push_back(current);
        current[k] = 0;
        return;
      }
      for (int e = remaining; e >= 0; --e) {
        current[k] = e;
        self(self, k + 1, remaining - e);
      }
      current[k] = 0;
    };
    recurse(recurse, 0, d);
    for (const auto& v : level) {
      std::vector<int> e(n, 0);
      for (size_t k = 0; k < vars.size(); ++k) e.at(vars[k]) = v[k];
      result.emplace_back(std::move(e));
    }
  }
  std::stable_sort(result.begin(), result.end(), GradedLess());
  return result;
}

long long basis_size(int num_vars, int max_degree) {
  if (max_degree < 0) return 0;
  long long r = 1;
  for (int i = 1; i <= num_vars; ++i) {
    r = r * (max_degree + i) / i;
  }
  return r;
}

template <typename T>
std::vector<T> coeff_vector(const Polynomial<T>& p, const std::vector<Monomial>& basis) {
  std::vector<T> result(basis.size(), T(0));
  std::map<Monomial, size_t, GradedLess> index;
  for (size_t i = 0; i < basis.size(); ++i) index.emplace(basis[i], i);
  for (const auto& [m, c] : p.terms()) {
    auto it = index.find(m);
    if (it == index.end()) {
      throw UsageError("term " + Polynomial<T>::term(p.universe(), m, T(1)).to_string() +
                       " is not in the basis");
    }
    result[it->second] = c;
  }
  return result;
}

template <typename T>
Polynomial<T> from_coeff_vector(const UniversePtr& universe,
                                const std::vector<Monomial>& basis,
                                const std::vector<T>& coefficients) {
  if (basis.size() != coefficients.size()) {
    throw UsageError("basis and coefficient vector sizes differ");
  }
  Polynomial<T> p(universe);
  for (size_t i = 0; i < basis.size(); ++i) p.add_term(basis[i], coefficients[i]);
  return p;
}

template std::vector<Rational> coeff_vector(const RatPolynomial&, const std::vector<Monomial>&);
template std::vector<double> coeff_vector(const FloatPolynomial&, const std::vector<Monomial>&);
template RatPolynomial from_coeff_vector(const UniversePtr&, const std::vector<Monomial>&,
                                         const std::vector<Rational>&);
template FloatPolynomial from_coeff_vector(const UniversePtr&, const std::vector<Monomial>&,
                                           const std::vector<double>&);

}  // namespace semialg

namespace semialg {

CompiledPolynomial::CompiledPolynomial(const FloatPolynomial& p) {
  offsets_.push_back(0);
  for (const auto& [m, c] : p.terms()) {
    coefficients_.push_back(c);
    for (int i = 0; i < m.size(); ++i) {
      if (m[i] > 0) factors_.push_back({i, m[i]});
    }
    offsets_.push_back(static_cast<int>(factors_.size()));
  }
}

double CompiledPolynomial::evaluate(const double* point) const {
  double total = 0.0;
  for (size_t t = 0; t < coefficients_.size(); ++t) {
    double v = coefficients_[t];
    for (int f = offsets_[t]; f < offsets_[t + 1]; ++f) {
      const double x = point[factors_[f].var];
      for (int e = 0; e < factors_[f].exponent; ++e) v *= x;
    }
    total += v;
  }
  return total;
}

}  // namespace semialg
