#include <memory>

#include "dmod/duality.hpp"
#include "dmod/geometry.hpp"
#include "dmod/jet.hpp"

namespace dmod {

namespace {

ScalarOperator d(std::initializer_list<unsigned> idx) { return ScalarOperator::d(idx); }

OperatorMatrix rows_of(const ContextPtr& ctx, std::size_t cols, const std::vector<Row>& rows) {
  OperatorMatrix m(ctx, 0, cols);
  for (const auto& r : rows) m.append_row(r);
  return m;
}

}  // namespace

CosseratReport cosserat_parametrization_check() {
  auto ctx = std::make_shared<DiffContext>(std::vector<std::string>{"x1", "x2"});
  CosseratReport rep;
  auto r = JetSystem::from_operator(killing_christoffel_operator(Metric::euclidean(ctx)));
  rep.spencer = first_spencer_operator(r).op;

  OperatorMatrix ad = formal_adjoint(rep.spencer);
  rep.equations = OperatorMatrix(ctx, ad.rows(), ad.cols());
  for (std::size_t i = 0; i < ad.rows(); ++i)
    for (std::size_t j = 0; j < ad.cols(); ++j) rep.equations.at(i, j) = -ad.at(i, j);
  std::vector<std::string> stresses{"sigma11", "sigma12", "sigma21", "sigma22", "mu1", "mu2"};
  rep.equations.row_labels() = {"f1", "f2", "m"};
  rep.equations.col_labels() = stresses;

  OperatorMatrix shown = rows_of(ctx, 6,
                                 {{d({1}), d({2}), 0, 0, 0, 0},
                                  {0, 0, d({1}), d({2}), 0, 0},
                                  {0, 1, -1, 0, d({1}), d({2})}});
  rep.equations_match = rep.equations.rows() == 3 && rep.equations.cols() == 6;
  for (std::size_t i = 0; rep.equations_match && i < 3; ++i)
    for (std::size_t j = 0; j < 6; ++j) rep.equations_match = rep.equations_match && rep.equations.at(i, j) == shown.at(i, j);

  rep.parametrization = rows_of(ctx, 3,
                                {{d({2}), 0, 0},
                                 {-d({1}), 0, 0},
                                 {0, -d({2}), 0},
                                 {0, d({1}), 0},
                                 {1, 0, d({2})},
                                 {0, -1, -d({1})}});
  rep.parametrization.row_labels() = stresses;
  rep.parametrization.col_labels() = {"phi1", "phi2", "phi3"};
  rep.solves = compose(rep.equations, rep.parametrization).is_zero();

  OperatorMatrix airy_potential = rows_of(ctx, 1, {{d({2})}, {d({1})}, {-1}});
  OperatorMatrix stress = compose(rep.parametrization, airy_potential);
  OperatorMatrix airy = rows_of(ctx, 1, {{d({2, 2})}, {-d({1, 2})}, {-d({1, 2})}, {d({1, 1})}, {0}, {0}});
  rep.airy = stress.rows() == 6;
  for (std::size_t i = 0; rep.airy && i < 6; ++i) rep.airy = stress.at(i, 0) == airy.at(i, 0);

  rep.zero_potentials = true;
  for (const auto& s : op_apply(rep.parametrization, std::vector<Scalar>(3))) rep.zero_potentials = rep.zero_potentials && s.is_zero();
  return rep;
}

}  // namespace dmod
