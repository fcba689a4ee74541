#include "dmod/polynomial.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "dmod/errors.hpp"

namespace dmod {

std::uint32_t Monomial::degree() const {
  std::uint32_t d = 0;
  for (const auto& [s, e] : factors) d += e;
  return d;
}

std::uint32_t Monomial::exponent(SymbolId s) const {
  for (const auto& [id, e] : factors) {
    if (id == s) return e;
    if (id > s) break;
  }
  return 0;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial r;
  auto i = a.factors.begin();
  auto j = b.factors.begin();
  while (i != a.factors.end() && j != b.factors.end()) {
    if (i->first < j->first) {
      r.factors.push_back(*i++);
    } else if (j->first < i->first) {
      r.factors.push_back(*j++);
    } else {
      r.factors.emplace_back(i->first, i->second + j->second);
      ++i;
      ++j;
    }
  }
  r.factors.insert(r.factors.end(), i, a.factors.end());
  r.factors.insert(r.factors.end(), j, b.factors.end());
  return r;
}

bool divides(const Monomial& a, const Monomial& b) {
  auto j = b.factors.begin();
  for (const auto& [s, e] : a.factors) {
    while (j != b.factors.end() && j->first < s) ++j;
    if (j == b.factors.end() || j->first != s || j->second < e) return false;
  }
  return true;
}

Monomial quotient(const Monomial& b, const Monomial& a) {
  Monomial r;
  auto i = a.factors.begin();
  for (const auto& [s, e] : b.factors) {
    while (i != a.factors.end() && i->first < s) ++i;
    std::uint32_t sub = (i != a.factors.end() && i->first == s) ? i->second : 0;
    if (e > sub) r.factors.emplace_back(s, e - sub);
  }
  return r;
}

Monomial gcd(const Monomial& a, const Monomial& b) {
  Monomial r;
  auto j = b.factors.begin();
  for (const auto& [s, e] : a.factors) {
    while (j != b.factors.end() && j->first < s) ++j;
    if (j != b.factors.end() && j->first == s) r.factors.emplace_back(s, std::min(e, j->second));
  }
  return r;
}

int grevlex_compare(const Monomial& a, const Monomial& b) {
  auto da = a.degree();
  auto db = b.degree();
  if (da != db) return da > db ? 1 : -1;
  // Scan from the highest symbol id downwards; the first difference decides,
  // a smaller exponent there means a larger monomial.
  auto i = a.factors.rbegin();
  auto j = b.factors.rbegin();
  while (i != a.factors.rend() || j != b.factors.rend()) {
    if (j == b.factors.rend() || (i != a.factors.rend() && i->first > j->first)) {
      return -1;  // a has positive exponent where b has 0
    }
    if (i == a.factors.rend() || j->first > i->first) return 1;
    if (i->second != j->second) return i->second < j->second ? 1 : -1;
    ++i;
    ++j;
  }
  return 0;
}

Polynomial::Polynomial(const Rational& c) {
  if (c != 0) terms_.push_back({Monomial{}, c});
}

Polynomial Polynomial::variable(SymbolId s, std::uint32_t exp) {
  Polynomial p;
  Monomial m;
  if (exp > 0) m.factors.emplace_back(s, exp);
  p.terms_.push_back({std::move(m), Rational(1)});
  return p;
}

Polynomial Polynomial::from_terms(std::vector<PolyTerm> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const PolyTerm& a, const PolyTerm& b) { return grevlex_compare(a.mono, b.mono) > 0; });
  Polynomial p;
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().mono == t.mono) {
      p.terms_.back().coef += t.coef;
      if (p.terms_.back().coef == 0) p.terms_.pop_back();
    } else if (t.coef != 0) {
      p.terms_.push_back(std::move(t));
    }
  }
  return p;
}

Rational Polynomial::constant_value() const {
  if (terms_.empty()) return Rational(0);
  const auto& last = terms_.back();
  return last.mono.is_one() ? last.coef : Rational(0);
}

std::uint32_t Polynomial::total_degree() const { return terms_.empty() ? 0 : terms_.front().mono.degree(); }

std::uint32_t Polynomial::degree_in(SymbolId s) const {
  std::uint32_t d = 0;
  for (const auto& t : terms_) d = std::max(d, t.mono.exponent(s));
  return d;
}

bool Polynomial::contains(SymbolId s) const {
  for (const auto& t : terms_)
    if (t.mono.exponent(s) > 0) return true;
  return false;
}

std::vector<SymbolId> Polynomial::symbols() const {
  std::vector<SymbolId> out;
  for (const auto& t : terms_)
    for (const auto& [s, e] : t.mono.factors) out.push_back(s);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& t : r.terms_) t.coef = -t.coef;
  return r;
}

namespace {

std::vector<PolyTerm> merge(const std::vector<PolyTerm>& a, const std::vector<PolyTerm>& b, bool subtract) {
  std::vector<PolyTerm> out;
  out.reserve(a.size() + b.size());
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    int c = grevlex_compare(i->mono, j->mono);
    if (c > 0) {
      out.push_back(*i++);
    } else if (c < 0) {
      out.push_back({j->mono, subtract ? Rational(-j->coef) : j->coef});
      ++j;
    } else {
      Rational s = subtract ? Rational(i->coef - j->coef) : Rational(i->coef + j->coef);
      if (s != 0) out.push_back({i->mono, std::move(s)});
      ++i;
      ++j;
    }
  }
  for (; i != a.end(); ++i) out.push_back(*i);
  for (; j != b.end(); ++j) out.push_back({j->mono, subtract ? Rational(-j->coef) : j->coef});
  return out;
}

}  // namespace

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.terms_.empty()) return *this;
  terms_ = merge(terms_, o.terms_, false);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.terms_.empty()) return *this;
  terms_ = merge(terms_, o.terms_, true);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial();
  if (a.terms_.size() == 1 && a.terms_[0].mono.is_one()) return b.scaled(a.terms_[0].coef);
  if (b.terms_.size() == 1 && b.terms_[0].mono.is_one()) return a.scaled(b.terms_[0].coef);
  std::vector<PolyTerm> prod;
  prod.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& s : a.terms_)
    for (const auto& t : b.terms_) prod.push_back({s.mono * t.mono, s.coef * t.coef});
  return Polynomial::from_terms(std::move(prod));
}

Polynomial Polynomial::scaled(const Rational& c) const {
  if (c == 0) return Polynomial();
  Polynomial r = *this;
  for (auto& t : r.terms_) t.coef *= c;
  return r;
}

Polynomial Polynomial::times_monomial(const Monomial& m) const {
  Polynomial r = *this;
  for (auto& t : r.terms_) t.mono = t.mono * m;
  return r;
}

std::optional<Polynomial> Polynomial::divide_exact(const Polynomial& o) const {
  if (o.is_zero()) throw DivisionByZero();
  if (is_zero()) return Polynomial();
  if (o.is_constant()) return scaled(Rational(1) / o.terms_[0].coef);
  Polynomial rem = *this;
  std::vector<PolyTerm> q;
  const auto& lo = o.terms_.front();
  while (!rem.is_zero()) {
    const auto& lt = rem.terms_.front();
    if (!divides(lo.mono, lt.mono)) return std::nullopt;
    PolyTerm t{quotient(lt.mono, lo.mono), lt.coef / lo.coef};
    Polynomial step = o.times_monomial(t.mono).scaled(t.coef);
    q.push_back(std::move(t));
    rem -= step;
  }
  Polynomial r;
  r.terms_ = std::move(q);
  return r;
}

Polynomial Polynomial::derivative(SymbolId s) const {
  std::vector<PolyTerm> out;
  for (const auto& t : terms_) {
    auto e = t.mono.exponent(s);
    if (e == 0) continue;
    Monomial m;
    for (const auto& f : t.mono.factors) {
      if (f.first != s) {
        m.factors.push_back(f);
      } else if (f.second > 1) {
        m.factors.emplace_back(s, f.second - 1);
      }
    }
    out.push_back({std::move(m), t.coef * e});
  }
  return from_terms(std::move(out));
}

Polynomial Polynomial::substitute(const Assignment& values) const {
  std::vector<PolyTerm> out;
  for (const auto& t : terms_) {
    PolyTerm nt{Monomial{}, t.coef};
    for (const auto& [s, e] : t.mono.factors) {
      auto it = values.find(s);
      if (it == values.end()) {
        nt.mono.factors.emplace_back(s, e);
      } else {
        Rational p(1);
        for (std::uint32_t k = 0; k < e; ++k) p *= it->second;
        nt.coef *= p;
      }
    }
    out.push_back(std::move(nt));
  }
  return from_terms(std::move(out));
}

Rational Polynomial::evaluate(const Assignment& values) const {
  Rational total(0);
  for (const auto& t : terms_) {
    Rational v = t.coef;
    for (const auto& [s, e] : t.mono.factors) {
      auto it = values.find(s);
      if (it == values.end()) throw Error("no value for symbol '" + symbol_name(s) + "'");
      for (std::uint32_t k = 0; k < e; ++k) v *= it->second;
    }
    total += v;
  }
  return total;
}

Polynomial Polynomial::monic() const {
  if (is_zero() || leading_coefficient() == 1) return *this;
  return scaled(Rational(1) / leading_coefficient());
}

std::vector<Polynomial> Polynomial::coefficients_in(SymbolId s) const {
  std::vector<std::vector<PolyTerm>> buckets(degree_in(s) + 1);
  for (const auto& t : terms_) {
    Monomial m;
    std::uint32_t e = 0;
    for (const auto& f : t.mono.factors) {
      if (f.first == s) {
        e = f.second;
      } else {
        m.factors.push_back(f);
      }
    }
    buckets[e].push_back({std::move(m), t.coef});
  }
  std::vector<Polynomial> out;
  out.reserve(buckets.size());
  for (auto& b : buckets) out.push_back(from_terms(std::move(b)));
  return out;
}

Polynomial Polynomial::from_coefficients_in(SymbolId s, const std::vector<Polynomial>& coeffs) {
  std::vector<PolyTerm> out;
  for (std::size_t d = 0; d < coeffs.size(); ++d) {
    Monomial xd;
    if (d > 0) xd.factors.emplace_back(s, static_cast<std::uint32_t>(d));
    for (const auto& t : coeffs[d].terms_) out.push_back({t.mono * xd, t.coef});
  }
  return from_terms(std::move(out));
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    Rational c = t.coef;
    bool neg = c < 0;
    if (neg) c = -c;
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    bool unit = (c == 1);
    if (!unit || t.mono.is_one()) {
      os << dmod::to_string(c);
      if (!t.mono.is_one()) os << "*";
    }
    bool firstf = true;
    for (const auto& [s, e] : t.mono.factors) {
      if (!firstf) os << "*";
      firstf = false;
      os << symbol_name(s);
      if (e > 1) os << "^" << e;
    }
  }
  return os.str();
}

std::size_t Polynomial::hash() const {
  std::size_t h = terms_.size();
  std::hash<std::string> hs;
  for (const auto& t : terms_) {
    for (const auto& [s, e] : t.mono.factors) h = h * 1000003u ^ (s * 31u + e);
    h = h * 1000003u ^ hs(t.coef.get_str());
  }
  return h;
}

bool operator==(const Polynomial& a, const Polynomial& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (!(a.terms_[i].mono == b.terms_[i].mono) || a.terms_[i].coef != b.terms_[i].coef) return false;
  }
  return true;
}

namespace {

Polynomial content_in(const Polynomial& p, SymbolId v) {
  Polynomial g;
  for (const auto& c : p.coefficients_in(v)) {
    if (c.is_zero()) continue;
    g = gcd(g, c);
    if (g.is_constant()) return Polynomial(1);
  }
  return g;
}

Polynomial primitive_in(const Polynomial& p, SymbolId v) {
  if (p.is_zero()) return p;
  auto c = content_in(p, v);
  if (c.is_constant()) return p;
  return *p.divide_exact(c);
}

// Pseudo-remainder of a by b in v, up to a nonzero factor in the other symbols.
Polynomial pseudo_remainder(const Polynomial& a, const Polynomial& b, SymbolId v) {
  auto ac = a.coefficients_in(v);
  auto bc = b.coefficients_in(v);
  std::size_t db = bc.size() - 1;
  const Polynomial& lb = bc[db];
  while (!ac.empty() && ac.size() - 1 >= db) {
    std::size_t da = ac.size() - 1;
    Polynomial lead = ac[da];
    for (auto& c : ac) c = c * lb;
    for (std::size_t j = 0; j <= db; ++j) ac[j + da - db] -= lead * bc[j];
    while (!ac.empty() && ac.back().is_zero()) ac.pop_back();
  }
  return Polynomial::from_coefficients_in(v, ac);
}

// Integer coefficients with content 1 and positive leading coefficient.
Polynomial integer_primitive(const Polynomial& p) {
  if (p.is_zero()) return p;
  mpz_class l = 1, g = 0;
  for (const auto& t : p.terms()) l = lcm(l, mpz_class(t.coef.get_den()));
  for (const auto& t : p.terms()) g = gcd(g, mpz_class(t.coef.get_num() * (l / t.coef.get_den())));
  Rational f(l, g);
  f.canonicalize();
  if (p.leading_coefficient() < 0) f = -f;
  return p.scaled(f);
}

Polynomial monomial_gcd_with(const Monomial& m, const Polynomial& p) {
  Monomial g = m;
  for (const auto& t : p.terms()) {
    g = gcd(g, t.mono);
    if (g.is_one()) break;
  }
  Polynomial r;
  return Polynomial::from_terms({PolyTerm{g, Rational(1)}});
}

}  // namespace

Polynomial gcd(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return Polynomial(1);
  if (a == b) return a.monic();
  if (a.is_monomial()) return monomial_gcd_with(a.leading().mono, b);
  if (b.is_monomial()) return monomial_gcd_with(b.leading().mono, a);
  if (a.total_degree() >= b.total_degree()) {
    if (a.divide_exact(b)) return b.monic();
  } else if (b.divide_exact(a)) {
    return a.monic();
  }

  auto sa = a.symbols();
  auto sb = b.symbols();
  SymbolId v = std::min(sa.front(), sb.front());
  bool in_a = std::binary_search(sa.begin(), sa.end(), v);
  bool in_b = std::binary_search(sb.begin(), sb.end(), v);
  if (!in_b) return gcd(content_in(a, v), b);
  if (!in_a) return gcd(a, content_in(b, v));

  Polynomial ca = content_in(a, v);
  Polynomial cb = content_in(b, v);
  Polynomial pa = ca.is_constant() ? a : *a.divide_exact(ca);
  Polynomial pb = cb.is_constant() ? b : *b.divide_exact(cb);
  Polynomial c = gcd(ca, cb);
  if (pa.degree_in(v) < pb.degree_in(v)) std::swap(pa, pb);
  while (!pb.is_zero()) {
    Polynomial r = pseudo_remainder(pa, pb, v);
    pa = std::move(pb);
    if (!r.is_zero() && r.degree_in(v) == 0) {
      pa = Polynomial(1);
      pb = Polynomial();
      break;
    }
    pb = integer_primitive(primitive_in(r, v));
  }
  Polynomial g = primitive_in(pa, v);
  return (c * g).monic();
}

}  // namespace dmod
