#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dmod/linalg.hpp"
#include "dmod/operator.hpp"

namespace dmod {

inline constexpr std::uint64_t kDefaultSeed = 20240101;

// Jet coordinate y^col_mu (col is 0-based).
struct JetCoord {
  unsigned col = 0;
  MultiIndex mu;
  bool operator==(const JetCoord&) const = default;
};

// Higher order first, then grevlex, then lower unknown index.
struct JetOrder {
  bool operator()(const JetCoord& a, const JetCoord& b) const;
};

using JetEquation = std::map<JetCoord, Scalar, JetOrder>;

int equation_order(const JetEquation& e);

// Linear equations a^{tau mu}_k(x) y^k_mu = 0 on J_q(E).
class JetSystem {
 public:
  JetSystem(ContextPtr ctx, unsigned m, unsigned q, std::vector<std::string> unknowns = {});
  // One equation per row of d; q defaults to the order of d.
  static JetSystem from_operator(const OperatorMatrix& d, int q = -1);

  const ContextPtr& context() const { return ctx_; }
  const DiffContext& ctx() const { return *ctx_; }
  unsigned n() const { return ctx_->n(); }
  unsigned m() const { return m_; }
  unsigned q() const { return q_; }
  const std::vector<JetEquation>& equations() const { return eqs_; }
  const std::vector<std::string>& unknowns() const { return names_; }

  // Zero equations are dropped; order above q throws.
  void add(JetEquation e);
  std::string coordinate_name(const JetCoord& c) const;
  std::string to_string(const JetEquation& e) const;
  OperatorMatrix to_operator() const;

 private:
  ContextPtr ctx_;
  unsigned m_;
  unsigned q_;
  std::vector<std::string> names_;
  std::vector<JetEquation> eqs_;
};

// All coordinates of J_q(E) (or of S_q T* x E when exact_order), sorted by JetOrder.
std::vector<JetCoord> jet_coordinates(unsigned n, unsigned m, unsigned q, bool exact_order = false);
std::size_t jet_dimension(unsigned n, unsigned m, unsigned q);

// d_i(a y_mu) = a y_{mu+1_i} + (d_i a) y_mu.
JetEquation formal_derivative(const JetEquation& e, unsigned i, const DiffContext& ctx);
// All d_nu of every equation with |nu| <= steps; order q + steps.
JetSystem prolong(const JetSystem& r, unsigned steps);
// Equations of order <= s in the span of r (exact elimination over K).
JetSystem project(const JetSystem& r, unsigned s);

// Reduced echelon form over K: principal jets as combinations of parametric ones.
struct SolvedForm {
  std::vector<JetCoord> parametric;  // by order, then JetOrder
  std::map<JetCoord, std::vector<Scalar>, JetOrder> principal;
  // Value of any coordinate of order <= q in terms of parametric values.
  std::vector<Scalar> express(const JetCoord& c) const;
};
SolvedForm solve_system(const JetSystem& r);

struct GenericPoint {
  std::uint64_t seed = kDefaultSeed;
  unsigned attempt = 0;
  Assignment values;
};

// Random nonzero rationals for every symbol of ctx; deterministic for a seed.
class PointSampler {
 public:
  PointSampler(const DiffContext& ctx, std::uint64_t seed);
  GenericPoint next();

 private:
  std::vector<SymbolId> symbols_;
  std::uint64_t seed_;
  unsigned attempt_ = 0;
};

// Evaluates m at points from the sampler, retrying (max 5) when a denominator vanishes.
QMatrix evaluate_generic(const KMatrix& m, PointSampler& sampler, GenericPoint* used = nullptr);

struct SymbolSpace {
  unsigned order = 0;
  std::vector<JetCoord> coords;              // basis of S_s T* x E
  QMatrix equations;                         // rows on coords
  std::vector<std::vector<Rational>> basis;  // kernel, i.e. g_s
  GenericPoint point;
  bool confirmed = false;  // same dimension at a second point
  std::size_t dim() const { return basis.size(); }
};

// Symbol g_{q+level} from the top-order part of prolong(r, level).
SymbolSpace symbol(const JetSystem& r, unsigned level, std::uint64_t seed = kDefaultSeed);
// g_0 .. g_{q+levels}; orders below q are full.
std::vector<SymbolSpace> symbol_family(const JetSystem& r, unsigned levels, std::uint64_t seed = kDefaultSeed);

// delta: wedge^p T* x S_s T* x E -> wedge^{p+1} T* x S_{s-1} T* x E,
// (delta w)^k_mu = dx^i ^ w^k_{mu+1_i}. Columns run over (mask, coord) of the source.
QMatrix delta_map(unsigned n, unsigned m, unsigned p, unsigned s);
// Same map restricted to wedge^p T* x g_s (columns over (mask, basis vector)).
QMatrix delta_map(const SymbolSpace& g, unsigned n, unsigned m, unsigned p);
// Sorted bitmasks of degree p in n variables.
std::vector<unsigned> form_masks(unsigned n, unsigned p);

struct DeltaEntry {
  unsigned p = 0;  // form degree
  unsigned s = 0;  // symbol order
  std::size_t b = 0, z = 0, h = 0;
};

struct DeltaReport {
  std::vector<DeltaEntry> entries;
  const DeltaEntry* at(unsigned p, unsigned s) const;
};

// Entries for every order s that has g_{s+1} in the family.
DeltaReport delta_cohomology(const std::vector<SymbolSpace>& family, unsigned n, unsigned m);

struct ClassReport {
  std::vector<std::size_t> beta;  // beta[i-1]: equations of class i
  std::size_t prolonged_rank = 0;
  std::size_t cartan_bound = 0;  // sum of i * beta^i
  bool cartan = false;
  std::size_t cc_count = 0;  // sum of (n - i) beta^i
  bool coordinates_changed = false;
  GenericPoint point;
};

// Classes of the order q symbol; tries variable permutations, then random linear
// changes, until the Cartan test passes.
ClassReport involutivity_classes(const JetSystem& r, std::uint64_t seed = kDefaultSeed);

struct FIStep {
  unsigned r = 0;
  bool clean = true;
  int new_order = -1;
  std::string new_equation;
  JetEquation equation;  // denominators cleared
  bool symbol_involutive = false;
};

struct FIReport {
  bool formally_integrable = false;
  int involutive_at = -1;  // prolongations needed for an involutive symbol
  std::vector<FIStep> steps;
};

FIReport formal_integrability_test(const JetSystem& r, unsigned steps, std::uint64_t seed = kDefaultSeed);

struct DimTable {
  unsigned n = 0, m = 0, q = 0;
  std::size_t jq = 0;
  std::size_t rq = 0;
  std::size_t gq = 0, gq1 = 0;
  std::vector<std::size_t> c, ce, f;  // r = 0..n
  GenericPoint point;
};

DimTable bundle_dims(const JetSystem& r, std::uint64_t seed = kDefaultSeed);

// (D xi)^k_{mu,i} = d_i xi^k_mu - xi^k_{mu+1_i}, one section of order q per i.
std::vector<JetSection> spencer_operator(const JetSection& xi, const DiffContext& ctx);

struct FirstSpencer {
  OperatorMatrix op;  // rows (parametric jet, i), columns parametric jets
  std::vector<JetCoord> parametric;
};

// Needs g_{q+1} = 0 and a clean first prolongation.
FirstSpencer first_spencer_operator(const JetSystem& r, std::uint64_t seed = kDefaultSeed);

}  // namespace dmod
