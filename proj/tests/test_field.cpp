#include <random>

#include "doctest.h"
#include "dmod/errors.hpp"
#include "support.hpp"

using namespace testing;

TEST_CASE("scalar arithmetic examples") {
  auto ctx = make_ctx(2);
  Scalar x1 = ctx->x(1);
  CHECK((Scalar(1) / x1) * x1 == Scalar(1));
  CHECK((x1 + (-x1)).is_zero());

  Scalar s = (x1 * x1 - 1) / (x1 - 1);
  CHECK(s == x1 + 1);
  // oracle: the reduced form times the cancelled factor gives back the numerator
  CHECK(s.numerator() * (x1 - 1).numerator() == (x1 * x1 - 1).numerator());
  CHECK(s.denominator() == Polynomial(1));

  CHECK_THROWS_AS(x1 / Scalar(0), DivisionByZero);
}

TEST_CASE("denominator is monic and fractions are reduced") {
  auto ctx = make_ctx(2);
  Scalar x1 = ctx->x(1), x2 = ctx->x(2);
  Scalar s = (2 * x1) / (4 * x1 * x2 + 6 * x1);
  CHECK(s.denominator().leading_coefficient() == 1);
  CHECK(s == Scalar(Rational(1, 2)) / (x2 + Rational(3, 2)));
  CHECK(gcd(s.numerator(), s.denominator()) == Polynomial(1));
}

TEST_CASE("scalar derivation") {
  auto ctx = make_ctx(2, {ParameterSpec{"a", 3, 1}});
  Scalar x1 = ctx->x(1);
  CHECK(ctx->derive(Scalar(1) / x1, 1) == Scalar(-1) / (x1 * x1));
  CHECK(ctx->derive(x1, 2).is_zero());
  Scalar a = ctx->param("a");
  CHECK(ctx->derive(a * a, 1) == 2 * a * ctx->param("a", 1));
  CHECK(ctx->derive(a, 2).is_zero());
  CHECK_THROWS_AS(ctx->derive(ctx->param("a", 3), 1), TruncationExceeded);
}

TEST_CASE("scalar evaluation") {
  auto ctx = make_ctx(2);
  Scalar x1 = ctx->x(1), x2 = ctx->x(2);
  Assignment pt{{ctx->var(1), Rational(2)}};
  CHECK((Scalar(1) / x1).evaluate(pt) == Rational(1, 2));
  Assignment pt2{{ctx->var(1), Rational(1)}, {ctx->var(2), Rational(-1)}};
  CHECK((x1 + x2).evaluate(pt2) == 0);
  Assignment pt3{{ctx->var(1), Rational(1)}};
  CHECK_THROWS_AS((Scalar(1) / (x1 - 1)).evaluate(pt3), PoleError);
}

TEST_CASE("field axioms and commuting derivations on random scalars") {
  auto ctx = make_ctx(3);
  std::vector<SymbolId> vars{ctx->var(1), ctx->var(2), ctx->var(3)};
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    Scalar a = random_scalar(rng, vars), b = random_scalar(rng, vars), c = random_scalar(rng, vars);
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a - a == Scalar(0));
    if (!a.is_zero()) CHECK(a * a.inverse() == Scalar(1));
    for (unsigned i = 1; i <= 3; ++i)
      for (unsigned j = i + 1; j <= 3; ++j)
        CHECK(ctx->derive(ctx->derive(a, i), j) == ctx->derive(ctx->derive(a, j), i));
    // normalization is idempotent: rebuilding from the stored parts changes nothing
    CHECK(Scalar::fraction(a.numerator(), a.denominator()) == a);
  }
}

TEST_CASE("multivariate gcd against constructed common factors") {
  auto ctx = make_ctx(3);
  std::vector<SymbolId> vars{ctx->var(1), ctx->var(2), ctx->var(3)};
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    Polynomial g = random_poly(rng, vars, 2, 1);
    Polynomial a = random_poly(rng, vars, 3, 1);
    Polynomial b = random_poly(rng, vars, 3, 1);
    if (g.is_zero() || a.is_zero() || b.is_zero()) continue;
    Polynomial h = gcd(g * a, g * b);
    CHECK((g * a).divide_exact(h).has_value());
    CHECK((g * b).divide_exact(h).has_value());
    CHECK(h.divide_exact(g.monic()).has_value());
  }
}

TEST_CASE("sums and derivatives agree with the cross-multiplied formulas") {
  auto ctx = make_ctx(3, {ParameterSpec{"a", 4, 1}});
  std::vector<SymbolId> vars{ctx->var(1), ctx->var(2), ctx->var(3)};
  std::vector<SymbolId> with_a{ctx->var(1), ctx->var(2), ctx->param("a").numerator().symbols()[0]};
  std::mt19937_64 rng(17);
  auto reduced = [](const Scalar& s) {
    return gcd(s.numerator(), s.denominator()) == Polynomial(1) && s.denominator().leading_coefficient() == 1;
  };
  for (int trial = 0; trial < 40; ++trial) {
    const auto& vs = trial % 2 ? vars : with_a;
    // repeated factors and factors free of some variables in the denominators
    Polynomial p = random_poly(rng, vs, 2, 1), q = random_poly(rng, {vs[1], vs[2]}, 2, 1);
    if (p.is_zero() || q.is_zero()) continue;
    Polynomial num = random_poly(rng, vs, 3, 2);
    Scalar s = Scalar::fraction(num, p * p * q), t = random_scalar(rng, vs);
    Polynomial a = s.numerator(), b = s.denominator(), c = t.numerator(), d = t.denominator();
    Scalar sum = s + t;
    CHECK(reduced(sum));
    CHECK(sum.numerator() * b * d == (a * d + c * b) * sum.denominator());
    for (unsigned i = 1; i <= 3; ++i) {
      Scalar ds = ctx->derive(s, i);
      CHECK(reduced(ds));
      Polynomial rule = ctx->derive(a, i) * b - a * ctx->derive(b, i);
      CHECK(ds.numerator() * b * b == rule * ds.denominator());
    }
  }
}
