#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "dmod/operator.hpp"

namespace testing {

using namespace dmod;

inline ContextPtr make_ctx(unsigned n, std::vector<ParameterSpec> params = {}) {
  std::vector<std::string> vars;
  for (unsigned i = 1; i <= n; ++i) vars.push_back("x" + std::to_string(i));
  return std::make_shared<DiffContext>(vars, std::move(params));
}

inline ScalarOperator D(std::initializer_list<unsigned> idx, const Scalar& a = Scalar(1)) {
  return ScalarOperator::d(idx, a);
}

inline OperatorMatrix matrix(const ContextPtr& ctx, std::size_t cols, const std::vector<Row>& rows) {
  OperatorMatrix m(ctx, 0, cols);
  for (const auto& r : rows) m.append_row(r);
  return m;
}

inline bool row_is_zero(const Row& r) {
  for (const auto& x : r)
    if (!x.is_zero()) return false;
  return true;
}

// Random polynomial with small integer coefficients in the given variables.
inline Polynomial random_poly(std::mt19937_64& rng, const std::vector<SymbolId>& vars, unsigned terms, unsigned deg) {
  std::uniform_int_distribution<int> coef(-3, 3), e(0, static_cast<int>(deg));
  std::vector<PolyTerm> out;
  for (unsigned t = 0; t < terms; ++t) {
    Monomial m;
    for (auto v : vars) {
      int k = e(rng);
      if (k > 0) m.factors.emplace_back(v, static_cast<std::uint32_t>(k));
    }
    out.push_back({m, Rational(coef(rng))});
  }
  return Polynomial::from_terms(out);
}

inline Scalar random_scalar(std::mt19937_64& rng, const std::vector<SymbolId>& vars, bool fraction = true) {
  Polynomial num = random_poly(rng, vars, 3, 1);
  if (!fraction) return Scalar(num);
  Polynomial den;
  while (den.is_zero()) den = random_poly(rng, vars, 2, 1);
  return Scalar::fraction(num, den);
}

inline ScalarOperator random_operator(std::mt19937_64& rng, const DiffContext& ctx, unsigned max_order,
                                      bool fractions = false) {
  std::vector<SymbolId> vars;
  for (unsigned i = 1; i <= ctx.n(); ++i) vars.push_back(ctx.var(i));
  ScalarOperator p;
  std::uniform_int_distribution<unsigned> nterms(1, 3), ord(0, max_order);
  unsigned k = nterms(rng);
  for (unsigned t = 0; t < k; ++t) {
    auto level = multi_indices_of_order(ctx.n(), ord(rng));
    std::uniform_int_distribution<std::size_t> pick(0, level.size() - 1);
    p.add_term(level[pick(rng)], random_scalar(rng, vars, fractions));
  }
  return p;
}

}  // namespace testing
