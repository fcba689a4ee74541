#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dmod/polynomial.hpp"

namespace dmod {

// Element of K: a reduced fraction of polynomials with monic denominator.
// Constants skip the polynomial representation entirely.
class Scalar {
 public:
  Scalar() = default;
  Scalar(const Rational& c) : c_(c) {}  // NOLINT(implicit)
  Scalar(long c) : c_(c) {}              // NOLINT(implicit)
  Scalar(int c) : c_(c) {}               // NOLINT(implicit)
  explicit Scalar(const Polynomial& p);
  static Scalar fraction(const Polynomial& num, const Polynomial& den);
  static Scalar symbol(std::string_view name);

  bool is_zero() const { return !f_ && c_ == 0; }
  bool is_one() const { return !f_ && c_ == 1; }
  bool is_constant() const { return !f_; }
  // Valid only when is_constant().
  const Rational& constant() const { return c_; }
  Polynomial numerator() const;
  Polynomial denominator() const;

  Scalar operator-() const;
  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  Scalar& operator/=(const Scalar& o);
  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
  Scalar inverse() const;

  // Throws PoleError when the denominator vanishes.
  Rational evaluate(const Assignment& point) const;
  Scalar substitute(const Assignment& values) const;
  std::vector<SymbolId> symbols() const;

  std::string to_string() const;
  std::size_t hash() const;
  friend bool operator==(const Scalar& a, const Scalar& b);
  friend class DiffContext;

 private:
  struct Fraction {
    Polynomial num;
    Polynomial den;
  };
  static Scalar normalized(Polynomial num, Polynomial den);
  static Scalar coprime(Polynomial num, Polynomial den);

  Rational c_;
  std::shared_ptr<const Fraction> f_;
};

// A coefficient function with a truncated jet chain along one derivation.
// Jet k is the symbol "name" for k = 0 and "name_k" above. A constant
// parameter has no jets and is killed by every derivation.
struct ParameterSpec {
  std::string name;
  unsigned order = 8;
  unsigned base = 1;  // 1-based derivation index
  bool constant = false;
};

// Independent variables x_1..x_n and declared parameters, with the n
// commuting derivations of K.
class DiffContext {
 public:
  explicit DiffContext(std::vector<std::string> vars, std::vector<ParameterSpec> params = {});

  unsigned n() const { return static_cast<unsigned>(vars_.size()); }
  const std::vector<std::string>& var_names() const { return names_; }
  SymbolId var(unsigned i) const { return vars_.at(i - 1); }
  Scalar x(unsigned i) const { return Scalar(Polynomial::variable(var(i))); }
  const std::vector<ParameterSpec>& params() const { return params_; }
  const ParameterSpec* find_param(std::string_view name) const;
  // Jet k of a declared parameter.
  Scalar param(std::string_view name, unsigned k = 0) const;
  static std::string jet_name(const std::string& base, unsigned k);
  // Every symbol a generic point must assign: variables, then parameter jets.
  std::vector<SymbolId> all_symbols() const;

  Polynomial derive(const Polynomial& p, unsigned i) const;
  Scalar derive(const Scalar& s, unsigned i) const;
  // Iterated derivative along a count vector (entry i-1 = times along x_i).
  template <class Counts>
  Scalar derive_multi(Scalar s, const Counts& counts) const {
    for (unsigned i = 1; i <= n(); ++i)
      for (unsigned k = 0; k < counts[i - 1]; ++k) s = derive(s, i);
    return s;
  }

 private:
  struct JetInfo {
    unsigned param;
    unsigned k;
  };
  std::vector<std::string> names_;
  std::vector<SymbolId> vars_;
  std::vector<ParameterSpec> params_;
  std::vector<std::vector<SymbolId>> jets_;
  std::unordered_map<SymbolId, JetInfo> jet_info_;
};

}  // namespace dmod
