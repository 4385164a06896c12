#pragma once

#include <gmpxx.h>

#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semialg {

using Rational = mpq_class;

/// Exact value of a finite double.
Rational rational_from_double(double value);

/// Nearest double to `value` (ties to even).
double rational_to_double(const Rational& value);

/// Parses "12", "-3/4", "0.25", "1e-3", "2.5E+2" exactly.
Rational parse_rational(std::string_view text);

/// "-3/4", "7".
std::string rational_to_string(const Rational& value);

/// Shortest round-trip decimal form of a double.
std::string double_to_string(double value);

/// Ordered list of variable names. Polynomials carry a shared pointer to the
/// universe they live in; arithmetic across different universes throws.
class VarUniverse {
 public:
  explicit VarUniverse(std::vector<std::string> names);

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int index) const { return names_.at(index); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<int> index_of(std::string_view name) const;

  bool operator==(const VarUniverse& other) const {
    return names_ == other.names_;
  }

 private:
  std::vector<std::string> names_;
};

using UniversePtr = std::shared_ptr<const VarUniverse>;

UniversePtr make_universe(std::vector<std::string> names);

/// Exponent vector over a universe.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(int num_vars) : exponents_(num_vars, 0) {}
  explicit Monomial(std::vector<int> exponents);

  static Monomial variable(int num_vars, int index, int power = 1);

  int size() const { return static_cast<int>(exponents_.size()); }
  int operator[](int index) const { return exponents_[index]; }
  const std::vector<int>& exponents() const { return exponents_; }
  int degree() const;
  int degree_in(const std::vector<int>& vars) const;
  bool is_constant() const { return degree() == 0; }

  Monomial operator*(const Monomial& other) const;

  bool operator==(const Monomial& other) const {
    return exponents_ == other.exponents_;
  }
  bool operator!=(const Monomial& other) const { return !(*this == other); }

 private:
  std::vector<int> exponents_;
};

/// Graded-lex order: lower total degree first; within a degree, the
/// lexicographically larger exponent vector first, so [1, x, y, x^2, xy, y^2].
struct GradedLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

struct MonomialHash {
  size_t operator()(const Monomial& m) const;
};

/// Degree of the zero polynomial.
inline constexpr int kZeroDegree = std::numeric_limits<int>::min();

/// Sparse multivariate polynomial with coefficients in T. Terms are kept in
/// graded-lex order and zero coefficients are never stored.
template <typename T>
class Polynomial {
 public:
  using Coefficient = T;
  using TermMap = std::map<Monomial, T, GradedLess>;

  Polynomial() = default;
  explicit Polynomial(UniversePtr universe);
  Polynomial(UniversePtr universe, const T& constant);

  static Polynomial variable(UniversePtr universe, int index);
  static Polynomial variable(UniversePtr universe, std::string_view name);
  static Polynomial term(UniversePtr universe, Monomial monomial,
                         const T& coefficient);

  const UniversePtr& universe() const { return universe_; }
  const TermMap& terms() const { return terms_; }
  int num_terms() const { return static_cast<int>(terms_.size()); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;

  T coefficient(const Monomial& monomial) const;
  T constant_term() const;

  /// Total degree; kZeroDegree for the zero polynomial.
  int degree() const;
  /// Degree counting only the listed variables.
  int degree_in(const std::vector<int>& vars) const;
  /// Indices of variables that occur with a nonzero exponent.
  std::vector<int> variables() const;

  void add_term(const Monomial& monomial, const T& coefficient);

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Polynomial& other);
  Polynomial& operator*=(const T& scalar);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) {
    return a += b;
  }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) {
    return a -= b;
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r = a;
    r *= b;
    return r;
  }
  friend Polynomial operator*(Polynomial a, const T& s) { return a *= s; }
  friend Polynomial operator*(const T& s, Polynomial a) { return a *= s; }

  Polynomial pow(int exponent) const;

  /// Evaluates at a full point of the universe.
  T evaluate(const std::vector<T>& point) const;

  /// Replaces bound variables by polynomials over `target`. Unbound
  /// variables are carried over by name and must exist in `target`.
  Polynomial substitute(const std::map<int, Polynomial>& bindings,
                        const UniversePtr& target) const;
  /// Same-universe substitution.
  Polynomial substitute(const std::map<int, Polynomial>& bindings) const;

  /// Fixes some variables to values; the universe is unchanged.
  Polynomial partial_evaluate(const std::map<int, T>& values) const;

  /// Re-expresses the polynomial in another universe, matching by name.
  Polynomial rebase(const UniversePtr& target) const;

  /// Drops terms with |coefficient| <= threshold.
  Polynomial pruned(const T& threshold) const;

  /// Sum of absolute coefficient values.
  T l1_norm() const;

  std::string to_string() const;

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.same_universe(b) && a.terms_ == b.terms_;
  }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) {
    return !(a == b);
  }

  bool same_universe(const Polynomial& other) const;

 private:
  void check_compatible(const Polynomial& other) const;

  UniversePtr universe_;
  TermMap terms_;
};

using RatPolynomial = Polynomial<Rational>;
using FloatPolynomial = Polynomial<double>;

extern template class Polynomial<Rational>;
extern template class Polynomial<double>;

/// Coefficient-wise nearest-double conversion.
FloatPolynomial to_float(const RatPolynomial& p);
/// Exact conversion of every double coefficient.
RatPolynomial to_rational(const FloatPolynomial& p);

/// Evaluates an exact polynomial at a floating point.
double evaluate_float(const RatPolynomial& p, const std::vector<double>& point);

/// Flat term list for fast repeated floating-point evaluation.
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  explicit CompiledPolynomial(const FloatPolynomial& p);
  explicit CompiledPolynomial(const RatPolynomial& p) : CompiledPolynomial(to_float(p)) {}

  double evaluate(const double* point) const;
  double evaluate(const std::vector<double>& point) const { return evaluate(point.data()); }

 private:
  struct Factor {
    int var;
    int exponent;
  };
  std::vector<double> coefficients_;
  std::vector<int> offsets_;
  std::vector<Factor> factors_;
};

/// All monomials in `vars` of total degree in [min_degree, max_degree],
/// graded-lex ascending. Exponents of other universe variables are zero.
std::vector<Monomial> monomial_basis(const VarUniverse& universe,
                                     const std::vector<int>& vars,
                                     int max_degree, int min_degree = 0);

/// Number of monomials in n variables of degree <= d.
long long basis_size(int num_vars, int max_degree);

/// Coefficients of `p` on `basis`; throws UsageError if a term of `p` is
/// not in the basis.
template <typename T>
std::vector<T> coeff_vector(const Polynomial<T>& p,
                            const std::vector<Monomial>& basis);

template <typename T>
Polynomial<T> from_coeff_vector(const UniversePtr& universe,
                                const std::vector<Monomial>& basis,
                                const std::vector<T>& coefficients);

}  // namespace semialg
