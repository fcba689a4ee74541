#include "dmod/scalar.hpp"

#include <algorithm>

#include "dmod/errors.hpp"

namespace dmod {

Scalar::Scalar(const Polynomial& p) {
  if (p.is_constant()) {
    c_ = p.constant_value();
  } else {
    f_ = std::make_shared<Fraction>(Fraction{p, Polynomial(1)});
  }
}

Scalar Scalar::normalized(Polynomial num, Polynomial den) {
  if (den.is_zero()) throw DivisionByZero();
  if (num.is_zero()) return Scalar();
  if (!den.is_constant()) {
    Polynomial g = gcd(num, den);
    if (!g.is_constant()) {
      num = *num.divide_exact(g);
      den = *den.divide_exact(g);
    }
  }
  Rational lc = den.leading_coefficient();
  if (lc != 1) {
    Rational inv = 1 / lc;
    num = num.scaled(inv);
    den = den.scaled(inv);
  }
  Scalar r;
  if (den.is_constant() && num.is_constant()) {
    r.c_ = num.constant_value();
  } else {
    r.f_ = std::make_shared<Fraction>(Fraction{std::move(num), std::move(den)});
  }
  return r;
}

// Numerator and denominator already coprime; only rescales the denominator.
Scalar Scalar::coprime(Polynomial num, Polynomial den) {
  if (num.is_zero()) return Scalar();
  Rational lc = den.leading_coefficient();
  if (lc != 1) {
    Rational inv = 1 / lc;
    num = num.scaled(inv);
    den = den.scaled(inv);
  }
  Scalar r;
  if (den.is_constant() && num.is_constant()) {
    r.c_ = num.constant_value();
  } else {
    r.f_ = std::make_shared<Fraction>(Fraction{std::move(num), std::move(den)});
  }
  return r;
}

Scalar Scalar::fraction(const Polynomial& num, const Polynomial& den) { return normalized(num, den); }

Scalar Scalar::symbol(std::string_view name) { return Scalar(Polynomial::variable(intern(name))); }

Polynomial Scalar::numerator() const { return f_ ? f_->num : Polynomial(c_); }

Polynomial Scalar::denominator() const { return f_ ? f_->den : Polynomial(1); }

Scalar Scalar::operator-() const {
  if (!f_) return Scalar(Rational(-c_));
  Scalar r;
  r.f_ = std::make_shared<Fraction>(Fraction{-f_->num, f_->den});
  return r;
}

Scalar& Scalar::operator+=(const Scalar& o) {
  if (!f_ && !o.f_) {
    c_ += o.c_;
    return *this;
  }
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  Polynomial a = numerator(), b = denominator();
  Polynomial c = o.numerator(), d = o.denominator();
  if (b == d) {
    *this = normalized(a + c, b);
    return *this;
  }
  if (b.is_constant() || d.is_constant()) {
    *this = normalized(a * d + c * b, b * d);
    return *this;
  }
  Polynomial g = gcd(b, d);
  Polynomial b1 = *b.divide_exact(g);
  Polynomial d1 = *d.divide_exact(g);
  Polynomial num = a * d1 + c * b1;
  if (num.is_zero()) return *this = Scalar();
  if (g.is_constant()) return *this = coprime(std::move(num), b1 * d);
  // Henrici: gcd(num, b1 d) = gcd(num, g) for reduced inputs.
  Polynomial h = gcd(num, g);
  Polynomial den = b1 * d;
  if (!h.is_constant()) {
    num = *num.divide_exact(h);
    den = *den.divide_exact(h);
  }
  return *this = coprime(std::move(num), std::move(den));
}

Scalar& Scalar::operator-=(const Scalar& o) { return *this += -o; }

Scalar& Scalar::operator*=(const Scalar& o) {
  if (!f_ && !o.f_) {
    c_ *= o.c_;
    return *this;
  }
  if (is_zero() || o.is_zero()) return *this = Scalar();
  if (!o.f_) {
    if (o.c_ == 1) return *this;
    auto f = std::make_shared<Fraction>(Fraction{f_->num.scaled(o.c_), f_->den});
    f_ = std::move(f);
    return *this;
  }
  if (!f_) {
    Rational c = c_;
    *this = o;
    if (c != 1) f_ = std::make_shared<Fraction>(Fraction{f_->num.scaled(c), f_->den});
    return *this;
  }
  Polynomial a = f_->num, b = f_->den, c = o.f_->num, d = o.f_->den;
  Polynomial g1 = gcd(a, d);
  Polynomial g2 = gcd(c, b);
  if (!g1.is_constant()) {
    a = *a.divide_exact(g1);
    d = *d.divide_exact(g1);
  }
  if (!g2.is_constant()) {
    c = *c.divide_exact(g2);
    b = *b.divide_exact(g2);
  }
  return *this = coprime(a * c, b * d);
}

Scalar Scalar::inverse() const {
  if (is_zero()) throw DivisionByZero();
  if (!f_) return Scalar(Rational(1 / c_));
  return normalized(f_->den, f_->num);
}

Scalar& Scalar::operator/=(const Scalar& o) {
  if (o.is_zero()) throw DivisionByZero();
  if (!f_ && !o.f_) {
    c_ /= o.c_;
    return *this;
  }
  return *this *= o.inverse();
}

Rational Scalar::evaluate(const Assignment& point) const {
  if (!f_) return c_;
  Rational d = f_->den.evaluate(point);
  if (d == 0) throw PoleError("denominator " + f_->den.to_string() + " vanishes at the evaluation point");
  return f_->num.evaluate(point) / d;
}

Scalar Scalar::substitute(const Assignment& values) const {
  if (!f_) return *this;
  Polynomial d = f_->den.substitute(values);
  if (d.is_zero()) throw PoleError("denominator " + f_->den.to_string() + " vanishes under substitution");
  return normalized(f_->num.substitute(values), d);
}

std::vector<SymbolId> Scalar::symbols() const {
  if (!f_) return {};
  auto a = f_->num.symbols();
  auto b = f_->den.symbols();
  std::vector<SymbolId> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::string Scalar::to_string() const {
  if (!f_) return dmod::to_string(c_);
  std::string num = f_->num.to_string();
  if (f_->den.is_constant()) return num;
  bool wrap_num = f_->num.terms().size() > 1;
  bool wrap_den = f_->den.terms().size() > 1 || f_->den.leading().mono.factors.size() > 1;
  std::string den = f_->den.to_string();
  return (wrap_num ? "(" + num + ")" : num) + "/" + (wrap_den ? "(" + den + ")" : den);
}

std::size_t Scalar::hash() const {
  if (!f_) return std::hash<std::string>{}(c_.get_str());
  return f_->num.hash() * 31u + f_->den.hash();
}

bool operator==(const Scalar& a, const Scalar& b) {
  if (!a.f_ || !b.f_) return !a.f_ && !b.f_ && a.c_ == b.c_;
  return a.f_ == b.f_ || (a.f_->num == b.f_->num && a.f_->den == b.f_->den);
}

DiffContext::DiffContext(std::vector<std::string> vars, std::vector<ParameterSpec> params)
    : names_(std::move(vars)), params_(std::move(params)) {
  for (const auto& v : names_) vars_.push_back(intern(v));
  for (unsigned p = 0; p < params_.size(); ++p) {
    const auto& spec = params_[p];
    if (!spec.constant && (spec.base < 1 || spec.base > n()))
      throw PreconditionError("parameter '" + spec.name + "' has base derivation out of range");
    std::vector<SymbolId> chain;
    unsigned top = spec.constant ? 0 : spec.order;
    for (unsigned k = 0; k <= top; ++k) {
      SymbolId s = intern(jet_name(spec.name, k));
      chain.push_back(s);
      jet_info_[s] = JetInfo{p, k};
    }
    jets_.push_back(std::move(chain));
  }
}

std::string DiffContext::jet_name(const std::string& base, unsigned k) {
  return k == 0 ? base : base + "_" + std::to_string(k);
}

const ParameterSpec* DiffContext::find_param(std::string_view name) const {
  for (const auto& p : params_)
    if (p.name == name) return &p;
  return nullptr;
}

Scalar DiffContext::param(std::string_view name, unsigned k) const {
  for (unsigned p = 0; p < params_.size(); ++p) {
    if (params_[p].name != name) continue;
    if (k >= jets_[p].size())
      throw TruncationExceeded("parameter '" + std::string(name) + "' has no jet of order " + std::to_string(k));
    return Scalar(Polynomial::variable(jets_[p][k]));
  }
  throw PreconditionError("unknown parameter '" + std::string(name) + "'");
}

std::vector<SymbolId> DiffContext::all_symbols() const {
  std::vector<SymbolId> out = vars_;
  for (const auto& chain : jets_) out.insert(out.end(), chain.begin(), chain.end());
  return out;
}

Polynomial DiffContext::derive(const Polynomial& p, unsigned i) const {
  if (i < 1 || i > n()) throw PreconditionError("derivation index out of range");
  Polynomial out;
  for (SymbolId s : p.symbols()) {
    if (s == vars_[i - 1]) {
      out += p.derivative(s);
      continue;
    }
    auto it = jet_info_.find(s);
    if (it == jet_info_.end()) continue;  // other variables and free constants
    const auto& spec = params_[it->second.param];
    if (spec.constant || spec.base != i) continue;
    unsigned k = it->second.k;
    if (k >= spec.order)
      throw TruncationExceeded("derivative of '" + symbol_name(s) + "' exceeds truncation order " +
                               std::to_string(spec.order) + " of parameter '" + spec.name + "'");
    out += p.derivative(s) * Polynomial::variable(jets_[it->second.param][k + 1]);
  }
  return out;
}

Scalar DiffContext::derive(const Scalar& s, unsigned i) const {
  if (s.is_constant()) return Scalar();
  Polynomial a = s.numerator();
  Polynomial b = s.denominator();
  Polynomial da = derive(a, i);
  if (b.is_constant()) return Scalar(da);
  Polynomial db = derive(b, i);
  if (db.is_zero()) return Scalar::fraction(da, b);
  bool plain = true;  // the derivation acts on b as the partial in x_i
  for (SymbolId s : b.symbols()) {
    auto it = jet_info_.find(s);
    if (it != jet_info_.end() && !params_[it->second.param].constant && params_[it->second.param].base == i) plain = false;
  }
  if (plain) {
    // b = c * bt with c free of x_i and every factor of bt involving x_i. With
    // r = bt / gcd(bt, bt'), the numerator a' r - a bt'/gcd is prime to bt r,
    // so only c can share a factor with it.
    Polynomial c;
    for (const auto& k : b.coefficients_in(vars_[i - 1])) c = gcd(c, k);
    Polynomial bt = *b.divide_exact(c);
    Polynomial dbt = bt.derivative(vars_[i - 1]);
    Polynomial g = gcd(bt, dbt);
    Polynomial r = *bt.divide_exact(g);
    Polynomial num = da * r - a * *dbt.divide_exact(g);
    Polynomial den = b * r;
    if (!c.is_constant()) {
      Polynomial h = gcd(num, c);
      if (!h.is_constant()) {
        num = *num.divide_exact(h);
        den = *den.divide_exact(h);
      }
    }
    return Scalar::coprime(std::move(num), std::move(den));
  }
  Polynomial g = gcd(b, db);
  Polynomial b1 = *b.divide_exact(g);
  return Scalar::fraction(da * b1 - a * *db.divide_exact(g), b * b1);
}

}  // namespace dmod
