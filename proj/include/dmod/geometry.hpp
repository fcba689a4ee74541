#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dmod/operator.hpp"

namespace dmod {

// Indices in this header are 0-based unless stated otherwise.

// Symmetric n x n metric with its inverse.
class Metric {
 public:
  // Throws PreconditionError when g is not symmetric or singular.
  Metric(ContextPtr ctx, std::vector<std::vector<Scalar>> g);
  static Metric euclidean(ContextPtr ctx);
  // diag(1, ..., 1, -1), the last variable is time.
  static Metric minkowski(ContextPtr ctx);

  unsigned n() const { return static_cast<unsigned>(g_.size()); }
  const ContextPtr& context() const { return ctx_; }
  const Scalar& operator()(unsigned i, unsigned j) const { return g_[i][j]; }
  const Scalar& inverse(unsigned i, unsigned j) const { return inv_[i][j]; }
  bool is_constant() const;

 private:
  ContextPtr ctx_;
  std::vector<std::vector<Scalar>> g_;
  std::vector<std::vector<Scalar>> inv_;
};

// Packed basis of symmetric pairs (i <= j), in row-major order.
std::vector<std::pair<unsigned, unsigned>> symmetric_pairs(unsigned n);
std::size_t symmetric_index(unsigned n, unsigned i, unsigned j);

// Exterior form; components keyed by the bitmask of dx indices (bit i for dx^{i+1}).
struct DifferentialForm {
  unsigned n = 0;
  unsigned degree = 0;
  std::map<unsigned, Scalar> c;

  static DifferentialForm zero(unsigned n, unsigned degree) { return {n, degree, {}}; }
  // Sum of given coefficients times dx^i (1-forms).
  static DifferentialForm one_form(const std::vector<Scalar>& coeffs);
  Scalar component(unsigned mask) const;
  // Component for an arbitrary index tuple, antisymmetrized (0-based indices).
  Scalar component(const std::vector<unsigned>& idx) const;
  void add(unsigned mask, const Scalar& v);
  bool is_zero() const { return c.empty(); }
  bool operator==(const DifferentialForm& o) const;
  std::string to_string() const;
};

using VectorField = std::vector<Scalar>;

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b);
DifferentialForm operator+(const DifferentialForm& a, const DifferentialForm& b);
DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b);
DifferentialForm exterior_d(const DifferentialForm& w, const DiffContext& ctx);
DifferentialForm interior(const VectorField& xi, const DifferentialForm& w);
// L(xi) = i(xi) d + d i(xi).
DifferentialForm lie_derivative_form(const VectorField& xi, const DifferentialForm& w, const DiffContext& ctx);
VectorField bracket(const VectorField& xi, const VectorField& eta, const DiffContext& ctx);

// L(xi)w as an operator on xi, one row per sorted index set of the form degree.
// A nonzero weight adds weight * w_I * d_r xi^r (densities).
OperatorMatrix lie_operator(const DifferentialForm& w, const ContextPtr& ctx, const Rational& weight = 0);

// Omega_ij = w_rj d_i xi^r + w_ir d_j xi^r + xi^r d_r w_ij, rows (i <= j).
OperatorMatrix killing_operator(const Metric& w);
// Trace-free part of the Killing operator.
OperatorMatrix conformal_killing_operator(const Metric& w);

// gamma[k][i][j].
using Christoffel = std::vector<std::vector<std::vector<Scalar>>>;
// rho[k][l][i][j].
using RiemannTensor = std::vector<std::vector<std::vector<std::vector<Scalar>>>>;

Christoffel christoffel(const Metric& w);
RiemannTensor riemann(const Christoffel& gamma, const DiffContext& ctx);
// Second order Medolaghi equations L(xi)gamma, rows (k, i <= j).
OperatorMatrix christoffel_operator(const Metric& w);
// Killing rows followed by the Christoffel rows.
OperatorMatrix killing_christoffel_operator(const Metric& w);

// Linearized Einstein operator on symmetric Omega (packed columns). Rows are
// the raised components E^ij, weighted by 2 off the diagonal, so that the
// matrix is exactly self-adjoint for the packed pairing. Constant metrics only.
OperatorMatrix einstein_operator(const Metric& w);

enum class StructureKind { Affine, Principal, Riemann, Contact, UnimodularContact };

std::string kind_name(StructureKind k);
// Accepts "1.7".."1.11" and the names returned by kind_name.
StructureKind parse_kind(const std::string& s);

struct StructureData {
  // Affine (n = 1): 1-form alpha dx and the object gamma.
  Scalar alpha;
  Scalar gamma;
  // Principal: frames[tau][i] = w^tau_i.
  std::vector<std::vector<Scalar>> frames;
  // Riemann.
  std::vector<std::vector<Scalar>> metric;
  // Contact: 1-form density (w_1, w_2, w_3).
  std::vector<Scalar> density;
  // Unimodular contact: 1-form a and 2-form b.
  DifferentialForm one;
  DifferentialForm two;
};

OperatorMatrix medolaghi(StructureKind kind, const StructureData& data, const ContextPtr& ctx);

struct StructureConstantsRecord {
  StructureKind kind = StructureKind::Contact;
  bool constant = false;
  std::vector<std::pair<std::string, Rational>> constants;
  // First non-constant defining expression when !constant.
  std::string obstruction;
  // Principal kind: c^t_{rs} stored at (t * n + r) * n + s.
  unsigned n = 0;
  std::vector<Rational> tensor;
};

StructureConstantsRecord vessiot_constants(StructureKind kind, const StructureData& data, const ContextPtr& ctx);
StructureConstantsRecord constant_curvature_check(const Metric& w);
// Quadratic Jacobi conditions; true for kinds with a single constant.
bool jacobi_check(const StructureConstantsRecord& r);

}  // namespace dmod
