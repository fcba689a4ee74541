#include <random>

#include "doctest.h"
#include "dmod/errors.hpp"
#include "support.hpp"

using namespace testing;

TEST_CASE("composition examples") {
  auto ctx = make_ctx(2);
  Scalar x1 = ctx->x(1);
  // d1 ∘ x1 = x1 d1 + 1
  CHECK(compose(D({1}), ScalarOperator(x1), *ctx) == D({1}, x1) + ScalarOperator(1));
  ScalarOperator p = D({1, 2}) - ScalarOperator(1);
  CHECK(compose(p, ScalarOperator(1), *ctx) == p);
  ScalarOperator q = D({2, 2});
  CHECK((compose(p, q, *ctx) - compose(q, p, *ctx)).is_zero());
  CHECK(compose(D({1}), D({2}), *ctx) == D({1, 2}));
}

TEST_CASE("adjoint examples") {
  auto ctx = make_ctx(2);
  CHECK(adjoint(D({1}), *ctx) == -D({1}));
  OperatorMatrix d = matrix(ctx, 1, {{D({1, 2})}, {D({2, 2})}});
  OperatorMatrix ad = formal_adjoint(d);
  REQUIRE(ad.rows() == 1);
  REQUIRE(ad.cols() == 2);
  CHECK(ad.at(0, 0) == D({1, 2}));
  CHECK(ad.at(0, 1) == D({2, 2}));
}

TEST_CASE("adjoint of the Kalman operator") {
  // -y' + A y + B u with m = 2 states, one input
  auto ctx = make_ctx(1);
  OperatorMatrix k = matrix(ctx, 3, {{-D({1}) + ScalarOperator(1), ScalarOperator(2), ScalarOperator(5)},
                                     {ScalarOperator(3), -D({1}) + ScalarOperator(4), ScalarOperator(6)}});
  OperatorMatrix ad = formal_adjoint(k);
  // (lambda' + lambda A, lambda B)
  CHECK(ad.at(0, 0) == D({1}) + ScalarOperator(1));
  CHECK(ad.at(0, 1) == ScalarOperator(3));
  CHECK(ad.at(1, 0) == ScalarOperator(2));
  CHECK(ad.at(1, 1) == D({1}) + ScalarOperator(4));
  CHECK(ad.at(2, 0) == ScalarOperator(5));
  CHECK(ad.at(2, 1) == ScalarOperator(6));
}

TEST_CASE("apply examples") {
  auto ctx = make_ctx(2);
  Scalar x1 = ctx->x(1), x2 = ctx->x(2);
  CHECK(op_apply(matrix(ctx, 1, {{D({2, 2})}}), std::vector<Scalar>{x2 * x2})[0] == Scalar(2));
  CHECK(op_apply(matrix(ctx, 1, {{D({1, 2}) - ScalarOperator(1)}}), std::vector<Scalar>{x1 * x2})[0] == 1 - x1 * x2);
  JetSection low(2, 1, 1);
  CHECK_THROWS_AS(op_apply(matrix(ctx, 1, {{D({2, 2})}}), low), PreconditionError);
  auto jet = JetSection::prolongation_of({x1 * x2 * x2}, 3, *ctx);
  CHECK(op_apply(matrix(ctx, 1, {{D({1, 2, 2})}}), jet)[0] == Scalar(2));
}

TEST_CASE("green divergence examples") {
  auto ctx = make_ctx(2);
  auto b = green_divergence(D({1}), *ctx);
  REQUIRE(b[0].size() == 1);
  CHECK(b[0][0].c == Scalar(1));
  CHECK(b[0][0].lam.order() == 0);
  CHECK(b[0][0].xi.order() == 0);
  CHECK(b[1].empty());
  auto b0 = green_divergence(ScalarOperator(ctx->x(1)), *ctx);
  CHECK(b0[0].empty());
  CHECK(b0[1].empty());
  auto b11 = green_divergence(D({1, 1}), *ctx);
  // lambda xi_1 - lambda_1 xi
  Bilinear expect = canonical({{Scalar(1), MultiIndex{}, MultiIndex::unit(1)}, {Scalar(-1), MultiIndex::unit(1), MultiIndex{}}});
  REQUIRE(b11[0].size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(b11[0][i].c == expect[i].c);
    CHECK(b11[0][i].lam == expect[i].lam);
    CHECK(b11[0][i].xi == expect[i].xi);
  }
}

namespace {

// lambda (P xi) - (ad(P) lambda) xi as a bilinear expression.
Bilinear green_defect(const ScalarOperator& p, const DiffContext& ctx) {
  Bilinear out;
  for (const auto& [mu, a] : p.terms()) out.push_back({a, MultiIndex{}, mu});
  ScalarOperator ad = adjoint(p, ctx);
  for (const auto& [mu, a] : ad.terms()) out.push_back({-a, mu, MultiIndex{}});
  return canonical(out);
}

bool same(const Bilinear& a, const Bilinear& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i].c == b[i].c) || !(a[i].lam == b[i].lam) || !(a[i].xi == b[i].xi)) return false;
  return true;
}

}  // namespace

TEST_CASE("adjoint involution and anti-homomorphism on random operators") {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (unsigned n = 1; n <= 3; ++n) {
    auto ctx = make_ctx(n);
    for (int trial = 0; trial < 70; ++trial, ++checked) {
      auto p = random_operator(rng, *ctx, 3);
      auto q = random_operator(rng, *ctx, 3);
      CHECK(adjoint(adjoint(p, *ctx), *ctx) == p);
      CHECK(adjoint(compose(p, q, *ctx), *ctx) == compose(adjoint(q, *ctx), adjoint(p, *ctx), *ctx));
    }
  }
  CHECK(checked >= 200);
}

TEST_CASE("composition is associative and order-additive") {
  std::mt19937_64 rng(99);
  auto ctx = make_ctx(2);
  for (int trial = 0; trial < 40; ++trial) {
    auto p = random_operator(rng, *ctx, 2, true);
    auto q = random_operator(rng, *ctx, 2);
    auto r = random_operator(rng, *ctx, 2);
    CHECK(compose(compose(p, q, *ctx), r, *ctx) == compose(p, compose(q, r, *ctx), *ctx));
    if (!p.is_zero() && !q.is_zero()) CHECK(compose(p, q, *ctx).order() == p.order() + q.order());
  }
}

TEST_CASE("green divergence identity by formal expansion") {
  std::mt19937_64 rng(5);
  auto ctx = make_ctx(2);
  for (int trial = 0; trial < 30; ++trial) {
    auto p = random_operator(rng, *ctx, 2, trial % 2 == 0);
    auto b = green_divergence(p, *ctx);
    Bilinear div;
    for (unsigned i = 1; i <= 2; ++i) {
      auto t = total_derivative(b[i - 1], i, *ctx);
      div.insert(div.end(), t.begin(), t.end());
    }
    CHECK(same(canonical(div), green_defect(p, *ctx)));
  }
}
