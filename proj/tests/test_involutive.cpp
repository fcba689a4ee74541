#include "doctest.h"
#include "dmod/involutive.hpp"
#include "support.hpp"

using namespace testing;

namespace {

OperatorMatrix ex37(const ContextPtr& ctx) {
  return matrix(ctx, 1, {{D({2, 2})}, {D({1, 2}) - ScalarOperator(1)}});
}

void check_cc(const OperatorMatrix& d, const OperatorMatrix& cc) {
  OperatorMatrix z = compose(cc, d);
  CHECK(z.is_zero());
}

}  // namespace

TEST_CASE("normal form examples") {
  auto ctx = make_ctx(2);
  auto b = InvolutiveBasis::of(ex37(ctx));
  CHECK(b.reduces_to_zero({D({2, 2})}));
  // d22, d12 - 1 generate the unit ideal: y itself is a member
  CHECK(b.reduces_to_zero({ScalarOperator(1)}));

  auto grad = InvolutiveBasis::of(matrix(ctx, 1, {{D({1})}, {D({2})}}));
  CHECK(grad.reduces_to_zero({compose(D({2}), D({2}), *ctx)}));
  auto nf = grad.normal_form({ScalarOperator(1)});
  CHECK(!nf.is_zero());
}

TEST_CASE("order-zero row is not in the module of d12, d22") {
  auto ctx = make_ctx(2);
  auto b = InvolutiveBasis::of(matrix(ctx, 1, {{D({1, 2})}, {D({2, 2})}}));
  auto nf = b.normal_form({ScalarOperator(1)}, true);
  CHECK(!nf.is_zero());
  CHECK(b.normal_form(nf.remainder).remainder == nf.remainder);
}

TEST_CASE("completion examples") {
  auto ctx = make_ctx(2);
  auto b = InvolutiveBasis::of(ex37(ctx));
  CHECK(b.order() == 0);
  auto ctx3 = make_ctx(3);
  auto g = InvolutiveBasis::of(matrix(ctx3, 1, {{D({1})}, {D({2})}, {D({3})}}));
  CHECK(g.size() == 3);
  CHECK(g.certified_prolongations() == 3);
}

TEST_CASE("cofactors reproduce the reduced row") {
  auto ctx = make_ctx(2);
  OperatorMatrix d = matrix(ctx, 1, {{D({1, 2})}, {D({2, 2})}});
  auto b = InvolutiveBasis::of(d);
  Row f{D({1, 1, 2}) + D({2, 2, 2}, ctx->x(1)) + D({1})};
  auto nf = b.normal_form(f, true);
  Row sum = nf.remainder;
  for (const auto& [g, c] : nf.cofactors) {
    Row gen = b.generator(g);
    sum[0] += compose(c, gen[0], *ctx);
  }
  CHECK(sum == f);
}

TEST_CASE("compatibility conditions of Example 3.7") {
  auto ctx = make_ctx(2);
  OperatorMatrix d = ex37(ctx);
  OperatorMatrix cc = compatibility_conditions(d);
  check_cc(d, cc);
  OperatorMatrix c = matrix(ctx, 2, {{D({1, 2}) - ScalarOperator(1), -D({2, 2})}});
  CHECK(row_module_equal(cc, c).equal);
}

TEST_CASE("compatibility conditions of Example 3.10") {
  auto ctx = make_ctx(2);
  OperatorMatrix d = matrix(ctx, 1, {{D({1, 2})}, {D({2, 2})}});
  OperatorMatrix cc = compatibility_conditions(d);
  check_cc(d, cc);
  CHECK(row_module_equal(cc, matrix(ctx, 2, {{-D({2}), D({1})}})).equal);
}

TEST_CASE("memberships of Example 3.7") {
  auto ctx = make_ctx(2);
  // unknowns u, v; C = d12 u - u - d22 v
  Row c{D({1, 2}) - ScalarOperator(1), -D({2, 2})};
  Row a{compose(D({1, 2}) + ScalarOperator(1), c[0], *ctx), compose(D({1, 2}) + ScalarOperator(1), c[1], *ctx)};
  Row bb{compose(D({1, 1}), c[0], *ctx), compose(D({1, 1}), c[1], *ctx)};
  OperatorMatrix mc = matrix(ctx, 2, {c});
  auto ma = row_module_membership(a, mc);
  CHECK(ma.member);
  CHECK(ma.cofactors[0] == D({1, 2}) + ScalarOperator(1));
  CHECK(row_module_membership(bb, mc).member);
  OperatorMatrix mab = matrix(ctx, 2, {a, bb});
  auto m = row_module_membership(c, mab);
  REQUIRE(m.member);
  // cofactors must reproduce C exactly (they need not be the displayed ones)
  Row rebuilt(2);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t k = 0; k < 2; ++k) rebuilt[k] += compose(m.cofactors[j], mab.at(j, k), *ctx);
  CHECK(rebuilt == c);
  // the displayed combination d22 B - d12 A + A
  Row shown(2);
  for (std::size_t k = 0; k < 2; ++k)
    shown[k] = compose(D({2, 2}), bb[k], *ctx) - compose(D({1, 2}), a[k], *ctx) + a[k];
  CHECK(shown == c);

  auto ctx1 = make_ctx(1);
  CHECK(!row_module_membership({ScalarOperator(1)}, matrix(ctx1, 1, {{D({1})}})).member);
}

TEST_CASE("row module equality examples") {
  auto ctx = make_ctx(2);
  auto a = matrix(ctx, 1, {{D({1, 2})}, {D({2, 2})}});
  auto b = matrix(ctx, 1, {{D({1})}, {D({2})}});
  auto cmp = row_module_equal(a, b);
  CHECK(!cmp.equal);
  REQUIRE(cmp.witness);
  CHECK(cmp.witness_from_second);
  CHECK((*cmp.witness)[0] == D({1}));
  CHECK(row_module_equal(a, a).equal);
}

TEST_CASE("free resolutions") {
  auto ctx = make_ctx(2);
  auto res = free_resolution(ex37(ctx), 3);
  REQUIRE(res.maps.size() == 2);
  CHECK(res.maps[1].rows() == 1);
  CHECK(res.exact_end);

  auto grad = free_resolution(matrix(ctx, 1, {{D({1})}, {D({2})}}), 3);
  REQUIRE(grad.maps.size() == 2);
  CHECK(grad.maps[1].rows() == 1);
  CHECK(grad.exact_end);
  check_cc(grad.maps[0], grad.maps[1]);
}
