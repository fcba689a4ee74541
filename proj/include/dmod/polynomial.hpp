#pragma once

#include <boost/container/small_vector.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dmod/rational.hpp"
#include "dmod/symbols.hpp"

namespace dmod {

using Assignment = std::unordered_map<SymbolId, Rational>;

// Power product of symbols, factors sorted by ascending id.
struct Monomial {
  using Factor = std::pair<SymbolId, std::uint32_t>;
  boost::container::small_vector<Factor, 4> factors;

  bool is_one() const { return factors.empty(); }
  std::uint32_t degree() const;
  std::uint32_t exponent(SymbolId s) const;
  bool operator==(const Monomial&) const = default;
};

Monomial operator*(const Monomial& a, const Monomial& b);
bool divides(const Monomial& a, const Monomial& b);
// b / a, requires divides(a, b).
Monomial quotient(const Monomial& b, const Monomial& a);
Monomial gcd(const Monomial& a, const Monomial& b);
// Graded reverse lexicographic order: -1, 0 or 1.
int grevlex_compare(const Monomial& a, const Monomial& b);

struct PolyTerm {
  Monomial mono;
  Rational coef;
};

// Sparse multivariate polynomial over the rationals. Terms are kept in
// strictly descending grevlex order with nonzero coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(const Rational& c);
  explicit Polynomial(long c) : Polynomial(Rational(c)) {}
  static Polynomial variable(SymbolId s, std::uint32_t exp = 1);
  static Polynomial from_terms(std::vector<PolyTerm> terms);

  const std::vector<PolyTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one()); }
  bool is_monomial() const { return terms_.size() == 1; }
  Rational constant_value() const;
  const PolyTerm& leading() const { return terms_.front(); }
  const Rational& leading_coefficient() const { return terms_.front().coef; }

  std::uint32_t total_degree() const;
  std::uint32_t degree_in(SymbolId s) const;
  bool contains(SymbolId s) const;
  std::vector<SymbolId> symbols() const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial scaled(const Rational& c) const;
  Polynomial times_monomial(const Monomial& m) const;

  // Quotient when o divides *this exactly over Q, otherwise nullopt.
  std::optional<Polynomial> divide_exact(const Polynomial& o) const;
  Polynomial derivative(SymbolId s) const;
  // Partial substitution of rational values; unassigned symbols stay.
  Polynomial substitute(const Assignment& values) const;
  // Full evaluation; throws if a symbol has no value.
  Rational evaluate(const Assignment& values) const;
  // Leading coefficient 1 (zero stays zero).
  Polynomial monic() const;
  // Coefficients of powers of s, index = degree in s.
  std::vector<Polynomial> coefficients_in(SymbolId s) const;
  static Polynomial from_coefficients_in(SymbolId s, const std::vector<Polynomial>& coeffs);

  std::string to_string() const;
  std::size_t hash() const;

  friend bool operator==(const Polynomial& a, const Polynomial& b);

 private:
  std::vector<PolyTerm> terms_;
};

// Monic greatest common divisor; gcd(0, 0) = 0.
Polynomial gcd(const Polynomial& a, const Polynomial& b);

}  // namespace dmod
