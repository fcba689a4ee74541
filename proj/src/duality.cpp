#include "dmod/duality.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "dmod/errors.hpp"
#include "dmod/linalg.hpp"

namespace dmod {

namespace {

int row_order(const Row& r) {
  int o = -1;
  for (const auto& e : r) o = std::max(o, e.order());
  return o;
}

Row compose_row(const ScalarOperator& a, const Row& z, const DiffContext& ctx) {
  Row out(z.size());
  for (std::size_t c = 0; c < z.size(); ++c)
    if (!z[c].is_zero()) out[c] = compose(a, z[c], ctx);
  return out;
}

template <class F>
auto at_step(int step, F&& f) {
  try {
    return f();
  } catch (const CapExceeded& e) {
    throw CapExceeded("step " + std::to_string(step) + ": " + e.what());
  }
}

// Rows of sparse vectors over a shared, growing set of column keys.
struct KeyedRows {
  std::map<std::uint64_t, std::size_t> cols;
  std::vector<std::vector<std::pair<std::size_t, Scalar>>> rows;

  void add(const InvolutiveBasis::Sparse& s) {
    std::vector<std::pair<std::size_t, Scalar>> r;
    for (const auto& [t, v] : s) {
      auto it = cols.try_emplace(t.key, cols.size()).first;
      r.emplace_back(it->second, v);
    }
    rows.push_back(std::move(r));
  }
  KMatrix matrix() const {
    KMatrix m(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (const auto& [c, v] : rows[i]) m(i, c) = v;
    return m;
  }
};

bool constant_coefficients(const ScalarOperator& a) {
  for (const auto& [mu, c] : a.terms())
    if (!c.is_constant()) return false;
  return true;
}

std::vector<SymbolId> derivation_symbols(unsigned n) {
  std::vector<SymbolId> out;
  for (unsigned i = 1; i <= n; ++i) out.push_back(intern("\xe2\x88\x82" + std::to_string(i)));
  return out;
}

Polynomial to_commutative(const ScalarOperator& a, const std::vector<SymbolId>& ds) {
  Polynomial out;
  for (const auto& [mu, c] : a.terms()) {
    Polynomial t(c.constant());
    for (unsigned i = 0; i < ds.size(); ++i)
      if (mu.c[i]) t = t * Polynomial::variable(ds[i], mu.c[i]);
    out += t;
  }
  return out;
}

ScalarOperator from_commutative(const Polynomial& p, const std::vector<SymbolId>& ds) {
  ScalarOperator out;
  for (const auto& t : p.terms()) {
    MultiIndex mu;
    for (unsigned i = 0; i < ds.size(); ++i) mu.c[i] = static_cast<std::uint8_t>(t.mono.exponent(ds[i]));
    out.add_term(mu, Scalar(t.coef));
  }
  return out;
}

}  // namespace

std::vector<ScalarOperator> annihilators(const Row& z, const InvolutiveBasis& basis, unsigned max_order) {
  const DiffContext& ctx = *basis.context();
  unsigned n = ctx.n();
  KeyedRows rows;
  std::vector<MultiIndex> nus;
  for (unsigned k = 0; k <= max_order; ++k) {
    for (const auto& nu : multi_indices_of_order(n, k)) {
      Row dz = compose_row(ScalarOperator::d(nu), z, ctx);
      rows.add(basis.to_sparse(basis.normal_form(dz).remainder));
      nus.push_back(nu);
    }
    if (k == 0) continue;
    auto ker = left_kernel(rows.matrix());
    if (ker.empty()) continue;
    std::vector<ScalarOperator> out;
    for (const auto& w : ker) {
      ScalarOperator a;
      for (std::size_t i = 0; i < w.size(); ++i)
        if (!w[i].is_zero()) a.add_term(nus[i], w[i]);
      if (!basis.reduces_to_zero(compose_row(a, z, ctx)))
        throw Error("annihilator check failed for " + a.to_string("z", &ctx));
      out.push_back(std::move(a));
    }
    return out;
  }
  return {};
}

std::vector<TorsionElement> extract_torsion(const OperatorMatrix& d, const OperatorMatrix& dprime,
                                            const DualityOptions& opts) {
  InvolutiveBasis basis = InvolutiveBasis::of(d, opts.completion);
  const DiffContext& ctx = d.ctx();

  std::vector<Row> candidates;
  for (std::size_t r = 0; r < dprime.rows(); ++r) {
    auto nf = basis.normal_form(dprime.row(r));
    if (!nf.is_zero()) candidates.push_back(nf.remainder);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Row& a, const Row& b) { return row_order(a) < row_order(b); });

  // Keep a K-independent subset.
  KeyedRows kept_rows;
  std::vector<Row> kept;
  for (const auto& c : candidates) {
    KeyedRows trial = kept_rows;
    trial.add(basis.to_sparse(c));
    if (rank(trial.matrix()) > kept.size()) {
      kept_rows = std::move(trial);
      kept.push_back(c);
    }
  }

  std::vector<TorsionElement> out;
  auto ds = derivation_symbols(ctx.n());
  for (const auto& z : kept) {
    TorsionElement t{z, annihilators(z, basis, opts.annihilator_order), false};
    out.push_back(t);
    if (t.annihilators.size() < 1) continue;
    if (!std::all_of(t.annihilators.begin(), t.annihilators.end(), constant_coefficients)) continue;
    // Split off a common factor b: the class of b∘z is killed by a/b.
    Polynomial g;
    for (const auto& a : t.annihilators) g = g.is_zero() ? to_commutative(a, ds) : gcd(g, to_commutative(a, ds));
    if (g.is_constant()) continue;
    g = g.monic();
    Row bz = basis.normal_form(compose_row(from_commutative(g, ds), z, ctx)).remainder;
    if (row_order(bz) < 0) continue;
    TorsionElement derived{bz, {}, true};
    for (const auto& a : t.annihilators) {
      ScalarOperator q = from_commutative(*to_commutative(a, ds).divide_exact(g), ds);
      if (!basis.reduces_to_zero(compose_row(q, bz, ctx)))
        throw Error("derived annihilator check failed for " + q.to_string("z", &ctx));
      derived.annihilators.push_back(std::move(q));
    }
    out.push_back(std::move(derived));
  }
  return out;
}

ParamVerdict double_duality_test(const OperatorMatrix& d, const DualityOptions& opts) {
  ParamVerdict v;
  v.adjoint = formal_adjoint(d);
  v.adjoint_cc = at_step(3, [&] { return compatibility_conditions(v.adjoint, opts.completion); });
  v.parametrization = formal_adjoint(v.adjoint_cc);
  for (std::size_t c = 0; c < d.cols(); ++c) v.parametrization.row_labels()[c] = d.col_label(c);
  for (std::size_t c = 0; c < v.parametrization.cols(); ++c)
    v.parametrization.col_labels()[c] = "phi" + std::to_string(c + 1);
  v.dprime = at_step(5, [&] { return compatibility_conditions(v.parametrization, opts.completion); });
  v.dprime.col_labels().resize(d.cols());
  for (std::size_t c = 0; c < d.cols(); ++c) v.dprime.col_labels()[c] = d.col_label(c);
  auto cmp = at_step(5, [&] { return row_module_equal(v.dprime, d, opts.completion); });
  v.torsion_free = cmp.equal;
  if (!cmp.equal) {
    v.witness = cmp.witness;
    if (opts.extract_torsion) v.torsion = extract_torsion(d, v.dprime, opts);
  }
  return v;
}

std::vector<TorsionElement> torsion_elements(const OperatorMatrix& d, const DualityOptions& opts) {
  return double_duality_test(d, opts).torsion;
}

OperatorMatrix kalman_operator(const std::vector<std::vector<Rational>>& a, const std::vector<std::vector<Rational>>& b) {
  std::size_t m = a.size();
  if (b.size() != m) throw PreconditionError("A and B must have the same number of rows");
  std::size_t r = m ? b[0].size() : 0;
  auto ctx = std::make_shared<DiffContext>(std::vector<std::string>{"t"});
  OperatorMatrix d(ctx, m, m + r);
  for (std::size_t i = 0; i < m; ++i) {
    if (a[i].size() != m || b[i].size() != r) throw PreconditionError("ragged A or B");
    d.row_labels()[i] = "e" + std::to_string(i + 1);
    for (std::size_t j = 0; j < m; ++j) {
      ScalarOperator e(Scalar(a[i][j]));
      if (i == j) e -= ScalarOperator::d({1});
      d.at(i, j) = e;
    }
    for (std::size_t j = 0; j < r; ++j) d.at(i, m + j) = ScalarOperator(Scalar(b[i][j]));
  }
  for (std::size_t j = 0; j < m; ++j) d.col_labels()[j] = "y" + std::to_string(j + 1);
  for (std::size_t j = 0; j < r; ++j) d.col_labels()[m + j] = "u" + std::to_string(j + 1);
  return d;
}

KalmanVerdict kalman_test(const std::vector<std::vector<Rational>>& a, const std::vector<std::vector<Rational>>& b) {
  OperatorMatrix d = kalman_operator(a, b);
  std::size_t m = a.size();
  std::size_t r = m ? b[0].size() : 0;
  QMatrix k(m, m * r);
  std::vector<std::vector<Rational>> blk = b;
  for (std::size_t s = 0; s < m; ++s) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < r; ++j) k(i, s * r + j) = blk[i][j];
    std::vector<std::vector<Rational>> next(m, std::vector<Rational>(r));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t l = 0; l < m; ++l)
        if (a[i][l] != 0)
          for (std::size_t j = 0; j < r; ++j) next[i][j] += a[i][l] * blk[l][j];
    blk = std::move(next);
  }
  KalmanVerdict v;
  v.rank = rank(k);
  v.rank_controllable = v.rank == m;
  DualityOptions opts;
  opts.extract_torsion = false;
  v.duality_controllable = double_duality_test(d, opts).torsion_free;
  return v;
}

namespace {

// Jet coordinate (order, unknown) of the adjoint system; larger order first.
using JetKey = std::pair<unsigned, unsigned>;
struct JetCmp {
  bool operator()(const JetKey& a, const JetKey& b) const {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  }
};
using JetRow = std::map<JetKey, Scalar, JetCmp>;

void axpy(JetRow& y, const Scalar& a, const JetRow& x) {
  for (const auto& [k, v] : x) {
    auto [it, fresh] = y.try_emplace(k, a * v);
    if (!fresh) {
      it->second += a * v;
      if (it->second.is_zero()) y.erase(it);
    }
  }
}

JetRow total_derivative(const JetRow& r, const DiffContext& ctx) {
  JetRow out;
  for (const auto& [k, v] : r) {
    axpy(out, v, JetRow{{{k.first + 1, k.second}, Scalar(1)}});
    Scalar dv = ctx.derive(v, 1);
    if (!dv.is_zero()) axpy(out, dv, JetRow{{k, Scalar(1)}});
  }
  return out;
}

// Fully reduced echelon form over the coefficient field.
struct Echelon {
  std::map<JetKey, JetRow, JetCmp> rows;

  // Returns the pivot and its coefficient before normalization.
  std::optional<std::pair<JetKey, Scalar>> add(JetRow r) {
    std::vector<JetKey> hits;
    for (const auto& [k, v] : r)
      if (rows.count(k)) hits.push_back(k);
    for (const auto& k : hits) {
      auto it = r.find(k);
      if (it == r.end()) continue;
      Scalar c = it->second;
      axpy(r, -c, rows.at(k));
    }
    if (r.empty()) return std::nullopt;
    JetKey lead = r.begin()->first;
    Scalar c = r.begin()->second;
    Scalar inv = c.inverse();
    for (auto& [k, v] : r) v *= inv;
    for (auto& [k, other] : rows) {
      auto it = other.find(lead);
      if (it == other.end()) continue;
      Scalar f = it->second;
      axpy(other, -f, r);
    }
    rows.emplace(lead, std::move(r));
    return std::make_pair(lead, c);
  }
};

Polynomial strip_monomial_content(const Polynomial& p) {
  if (p.is_zero() || p.is_constant()) return Polynomial(1);
  Monomial g = p.terms().front().mono;
  for (const auto& t : p.terms()) g = gcd(g, t.mono);
  std::vector<PolyTerm> terms;
  for (const auto& t : p.terms()) terms.push_back({quotient(t.mono, g), t.coef});
  Polynomial q = Polynomial::from_terms(std::move(terms));
  return q.is_constant() ? Polynomial(1) : q.monic();
}

std::string render(const JetRow& r, const std::vector<std::string>& labels) {
  Row row(labels.size());
  for (const auto& [k, v] : r) {
    MultiIndex mu;
    mu.c[0] = static_cast<std::uint8_t>(k.first);
    row[k.second].add_term(mu, v);
  }
  std::string out;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j].is_zero()) continue;
    std::string s = row[j].to_string(labels[j]);
    if (out.empty()) {
      out = s;
    } else if (s[0] == '-') {
      out += " - " + s.substr(1);
    } else {
      out += " + " + s;
    }
  }
  return out + " = 0";
}

}  // namespace

InjectivityReport adjoint_injectivity_test(const OperatorMatrix& d, unsigned max_order) {
  if (d.n() != 1) throw PreconditionError("adjoint injectivity test needs exactly one independent variable");
  if (compatibility_conditions(d).rows() != 0) throw PreconditionError("operator is not surjective");
  const DiffContext& ctx = d.ctx();
  OperatorMatrix ad = formal_adjoint(d);
  std::size_t p = ad.cols();
  unsigned q = static_cast<unsigned>(std::max(ad.order(), 0));
  unsigned cap = max_order ? max_order : q + (q + 1) * static_cast<unsigned>(p) + 2;

  std::vector<JetRow> current;
  std::vector<unsigned> order;
  for (std::size_t r = 0; r < ad.rows(); ++r) {
    JetRow row;
    for (std::size_t j = 0; j < p; ++j)
      for (const auto& [mu, c] : ad.at(r, j).terms()) row[{mu.c[0], static_cast<unsigned>(j)}] = c;
    if (row.empty()) continue;
    order.push_back(row.begin()->first.first);
    current.push_back(std::move(row));
  }

  InjectivityReport rep;
  Echelon ech;
  std::size_t zero_rank = 0;
  Polynomial product(1);
  for (unsigned level = 0; level <= cap; ++level) {
    rep.order_reached = level;
    for (std::size_t r = 0; r < current.size(); ++r) {
      if (order[r] > level) continue;
      if (order[r] < level) current[r] = total_derivative(current[r], ctx);
      auto piv = ech.add(current[r]);
      if (!piv || piv->first.first != 0) continue;
      ++zero_rank;
      Polynomial f = strip_monomial_content(piv->second.numerator());
      Polynomial g = gcd(f, product);
      if (!g.is_constant()) f = *f.divide_exact(g);
      product = product * f;
    }
    if (zero_rank == p) break;
  }
  for (const auto& [k, row] : ech.rows)
    if (k.first == 0) rep.zero_order.push_back(render(row, ad.col_labels()));
  rep.injective = zero_rank == p;
  rep.obstruction = product.is_constant() ? Polynomial(1) : product.monic();
  return rep;
}

OperatorMatrix specialize(const OperatorMatrix& d, const std::vector<std::pair<std::string, Rational>>& values) {
  const DiffContext& ctx = d.ctx();
  Assignment sub;
  std::vector<ParameterSpec> kept;
  for (const auto& spec : ctx.params()) {
    auto it = std::find_if(values.begin(), values.end(), [&](const auto& v) { return v.first == spec.name; });
    if (it == values.end()) {
      kept.push_back(spec);
      continue;
    }
    unsigned top = spec.constant ? 0 : spec.order;
    for (unsigned k = 0; k <= top; ++k) sub[intern(DiffContext::jet_name(spec.name, k))] = k == 0 ? it->second : 0;
  }
  for (const auto& [name, v] : values)
    if (!ctx.find_param(name)) throw PreconditionError("unknown parameter '" + name + "'");
  auto nctx = std::make_shared<DiffContext>(ctx.var_names(), kept);
  OperatorMatrix out(nctx, d.rows(), d.cols());
  out.row_labels() = d.row_labels();
  out.col_labels() = d.col_labels();
  for (std::size_t r = 0; r < d.rows(); ++r)
    for (std::size_t c = 0; c < d.cols(); ++c) {
      ScalarOperator e;
      for (const auto& [mu, a] : d.at(r, c).terms()) e.add_term(mu, a.substitute(sub));
      out.at(r, c) = e;
    }
  return out;
}

std::optional<OperatorMatrix> find_left_inverse(const OperatorMatrix& p, unsigned order) {
  const DiffContext& ctx = p.ctx();
  std::size_t m = p.rows(), k = p.cols();
  std::vector<std::pair<std::size_t, MultiIndex>> unknowns;
  for (std::size_t j = 0; j < m; ++j)
    for (const auto& nu : multi_indices_up_to(ctx.n(), order)) unknowns.emplace_back(j, nu);

  // Equations indexed by (column of P, derivative multi-index).
  std::map<std::pair<std::size_t, MultiIndex>, std::size_t> eq;
  std::vector<std::vector<std::pair<std::size_t, Scalar>>> entries(unknowns.size());
  for (std::size_t u = 0; u < unknowns.size(); ++u) {
    auto [j, nu] = unknowns[u];
    ScalarOperator dn = ScalarOperator::d(nu);
    for (std::size_t c = 0; c < k; ++c) {
      if (p.at(j, c).is_zero()) continue;
      ScalarOperator prod = compose(dn, p.at(j, c), ctx);
      for (const auto& [mu, a] : prod.terms()) {
        auto it = eq.try_emplace({c, mu}, eq.size()).first;
        entries[u].emplace_back(it->second, a);
      }
    }
  }
  for (std::size_t a = 0; a < k; ++a) eq.try_emplace({a, MultiIndex{}}, eq.size());
  KMatrix mat(eq.size(), unknowns.size());
  for (std::size_t u = 0; u < unknowns.size(); ++u)
    for (const auto& [r, v] : entries[u]) mat(r, u) = v;

  OperatorMatrix l(p.context(), k, m);
  for (std::size_t j = 0; j < m; ++j) l.col_labels()[j] = p.row_label(j);
  for (std::size_t a = 0; a < k; ++a) l.row_labels()[a] = p.col_label(a);
  for (std::size_t a = 0; a < k; ++a) {
    std::vector<Scalar> rhs(eq.size());
    rhs[eq.at({a, MultiIndex{}})] = Scalar(1);
    auto sol = solve(mat, rhs);
    if (!sol) return std::nullopt;
    for (std::size_t u = 0; u < unknowns.size(); ++u)
      if (!(*sol)[u].is_zero()) l.at(a, unknowns[u].first).add_term(unknowns[u].second, (*sol)[u]);
  }
  return l;
}

ParametrizationReport verify_parametrization(const OperatorMatrix& d, const OperatorMatrix& candidate,
                                             int inverse_order_cap, CompletionOptions opts) {
  if (candidate.rows() != d.cols())
    throw PreconditionError("candidate has " + std::to_string(candidate.rows()) + " rows, the operator acts on " +
                            std::to_string(d.cols()) + " unknowns");
  ParametrizationReport rep;
  rep.composes_to_zero = compose(d, candidate).is_zero();
  auto cc = compatibility_conditions(candidate, opts);
  auto cmp = row_module_equal(cc, d, opts);
  rep.generates_cc = cmp.equal;
  rep.cc_witness = cmp.witness;
  if (inverse_order_cap >= 0) {
    rep.left_inverse_searched = true;
    rep.inverse_order_cap = static_cast<unsigned>(inverse_order_cap);
    for (int s = 0; s <= inverse_order_cap && !rep.left_inverse; ++s)
      rep.left_inverse = find_left_inverse(candidate, static_cast<unsigned>(s));
  }
  return rep;
}

}  // namespace dmod
