#include "dmod/builtins.hpp"

#include <map>
#include <memory>

#include "dmod/errors.hpp"

namespace dmod {

namespace {

const std::map<std::string, std::string>& dsl_sources() {
  static const std::map<std::string, std::string> s{
      {"ex37",
       "system ex37\nvars x1 x2\nunknowns y\n"
       "eq u: d[2,2](y) = 0\neq v: d[1,2](y) - y = 0\n"},
      {"ex310",
       "system ex310\nvars x1 x2\nunknowns xi\n"
       "eq eta1: d[1,2](xi) = 0\neq eta2: d[2,2](xi) = 0\n"},
      {"cauchy2",
       "system cauchy2\nvars x1 x2\nunknowns s11 s12 s22\n"
       "eq f1: d[1](s11) + d[2](s12) = 0\neq f2: d[1](s12) + d[2](s22) = 0\n"},
      // Cart x with two pendulums of lengths l1, l2 (gravity 1).
      {"pendulum",
       "system pendulum\nvars t\nparams\n  l1: const\n  l2: const\nunknowns x theta1 theta2\n"
       "eq d[1,1](x) + l1*d[1,1](theta1) + theta1 = 0\n"
       "eq d[1,1](x) + l2*d[1,1](theta2) + theta2 = 0\n"},
      // Double integrator y1' = y2, y2' = u.
      {"kalman-demo",
       "system kalman_demo\nvars t\nunknowns y1 y2 u\n"
       "eq d[1](y1) - y2 = 0\neq d[1](y2) - u = 0\n"},
  };
  return s;
}

ContextPtr plane_ctx(unsigned n) {
  std::vector<std::string> vars;
  for (unsigned i = 1; i <= n; ++i) vars.push_back("x" + std::to_string(i));
  return std::make_shared<DiffContext>(vars);
}

DifferentialForm form(unsigned n, unsigned mask, const Scalar& c) {
  DifferentialForm w = DifferentialForm::zero(n, static_cast<unsigned>(__builtin_popcount(mask)));
  w.add(mask, c);
  return w;
}

// Unknowns named xi1, xi2, ...
SystemDecl vector_fields(const std::string& name, OperatorMatrix op) {
  op.col_labels().resize(op.cols());
  for (std::size_t c = 0; c < op.cols(); ++c) op.col_labels()[c] = "xi" + std::to_string(c + 1);
  return decl_from_operator(name, op);
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"ex37",  "ex310",   "cauchy2", "killing2",   "killing4", "conformal4",
          "einstein4", "contact", "unimodular", "pendulum", "kalman-demo"};
}

SystemDecl builtin_system(const std::string& name) {
  auto it = dsl_sources().find(name);
  if (it != dsl_sources().end()) return parse_system(it->second);
  // Killing + Christoffel, the second order system R_2 of the plane.
  if (name == "killing2") return vector_fields(name, killing_christoffel_operator(Metric::euclidean(plane_ctx(2))));
  if (name == "killing4") return vector_fields(name, killing_operator(Metric::minkowski(plane_ctx(4))));
  if (name == "conformal4")
    return vector_fields(name, conformal_killing_operator(Metric::euclidean(plane_ctx(4))));
  if (name == "einstein4") return decl_from_operator(name, einstein_operator(Metric::minkowski(plane_ctx(4))));
  if (name == "contact" || name == "unimodular") {
    auto inst = structure_instance(name == "contact" ? StructureKind::Contact : StructureKind::UnimodularContact);
    return vector_fields(name, medolaghi(inst.kind, inst.choices.front().second, inst.ctx));
  }
  throw PreconditionError("unknown builtin '" + name + "'");
}

std::optional<OperatorMatrix> builtin_candidate(const std::string& name, const ContextPtr& ctx) {
  auto one = [&](std::vector<ScalarOperator> rows, std::string potential) {
    OperatorMatrix p(ctx, 0, 1);
    for (auto& r : rows) p.append_row({r});
    p.col_labels() = {std::move(potential)};
    return p;
  };
  if (name == "cauchy2")
    return one({ScalarOperator::d({2, 2}), -ScalarOperator::d({1, 2}), ScalarOperator::d({1, 1})}, "phi");
  if (name == "contact") {
    // Corrected sign in the third component; see the README.
    Scalar x3 = ctx->x(3);
    return one({ScalarOperator(1) - ScalarOperator::d({3}, x3), -ScalarOperator::d({3}),
                ScalarOperator::d({2}) + ScalarOperator::d({1}, x3)},
               "theta");
  }
  return std::nullopt;
}

StructureInstance structure_instance(StructureKind kind) {
  StructureInstance inst{kind, nullptr, {}};
  switch (kind) {
    case StructureKind::Affine: {
      inst.ctx = std::make_shared<DiffContext>(std::vector<std::string>{"x"});
      StructureData a;
      a.alpha = Scalar(1);
      inst.choices.push_back({"alpha = 1, gamma = 0", a});
      a.alpha = 1 / inst.ctx->x(1);
      inst.choices.push_back({"alpha = 1/x, gamma = 0", a});
      break;
    }
    case StructureKind::Principal: {
      inst.ctx = plane_ctx(3);
      StructureData f;
      f.frames = {{Scalar(1), Scalar(), Scalar()}, {Scalar(), Scalar(1), Scalar()}, {Scalar(), Scalar(), Scalar(1)}};
      inst.choices.push_back({"w = (dx1, dx2, dx3)", f});
      f.frames[0] = {Scalar(1), -inst.ctx->x(3), Scalar()};
      inst.choices.push_back({"w = (dx1 - x3 dx2, dx2, dx3)", f});
      break;
    }
    case StructureKind::Riemann: {
      // Coordinates (u, phi) with u = cos(theta) on the sphere.
      inst.ctx = std::make_shared<DiffContext>(std::vector<std::string>{"u", "phi"});
      Scalar u = inst.ctx->x(1);
      StructureData m;
      m.metric = {{Scalar(1), Scalar()}, {Scalar(), Scalar(1)}};
      inst.choices.push_back({"euclidean", m});
      m.metric = {{1 / (1 - u * u), Scalar()}, {Scalar(), 1 - u * u}};
      inst.choices.push_back({"unit sphere", m});
      break;
    }
    case StructureKind::Contact: {
      inst.ctx = plane_ctx(3);
      StructureData c;
      c.density = {Scalar(1), -inst.ctx->x(3), Scalar()};
      inst.choices.push_back({"w = dx1 - x3 dx2", c});
      c.density = {Scalar(1), Scalar(), Scalar()};
      inst.choices.push_back({"w = dx1", c});
      break;
    }
    case StructureKind::UnimodularContact: {
      inst.ctx = plane_ctx(3);
      Scalar x1 = inst.ctx->x(1), x3 = inst.ctx->x(3);
      StructureData u;
      u.one = DifferentialForm::one_form({Scalar(1), -x3, Scalar()});
      u.two = form(3, 0b110, Scalar(1));
      inst.choices.push_back({"a = dx1 - x3 dx2, b = dx2^dx3", u});
      u.one = DifferentialForm::one_form({Scalar(1), Scalar(), Scalar()});
      inst.choices.push_back({"a = dx1, b = dx2^dx3", u});
      u.one = DifferentialForm::one_form({1 / x1, Scalar(), Scalar()});
      u.two = form(3, 0b110, x1);
      inst.choices.push_back({"a = dx1/x1, b = x1 dx2^dx3", u});
      break;
    }
  }
  return inst;
}

}  // namespace dmod
