#include "dmod/geometry.hpp"

#include <algorithm>
#include <bit>

#include "dmod/errors.hpp"
#include "dmod/linalg.hpp"

namespace dmod {

namespace {

MultiIndex d1(unsigned i) { return MultiIndex::unit(i + 1); }
MultiIndex d2(unsigned i, unsigned j) { return MultiIndex::unit(i + 1) + MultiIndex::unit(j + 1); }

void add(Row& row, unsigned col, const MultiIndex& mu, const Scalar& a) {
  if (!a.is_zero()) row[col].add_term(mu, a);
}

// Inverse of a square matrix over K, nullopt when singular.
std::optional<std::vector<std::vector<Scalar>>> invert(const std::vector<std::vector<Scalar>>& g) {
  std::size_t n = g.size();
  KMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (g[i].size() != n) throw PreconditionError("matrix is not square");
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = g[i][j];
    aug(i, n + i) = Scalar(1);
  }
  auto piv = rref(aug);
  if (piv.size() < n || piv.back() >= n) return std::nullopt;
  std::vector<std::vector<Scalar>> inv(n, std::vector<Scalar>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < n; ++j) inv[piv[r]][j] = aug(r, n + j);
  return inv;
}

std::vector<unsigned> mask_indices(unsigned mask) {
  std::vector<unsigned> out;
  for (unsigned i = 0; mask; ++i, mask >>= 1)
    if (mask & 1u) out.push_back(i);
  return out;
}

// Masks of the given popcount, ordered lexicographically by index tuple.
std::vector<unsigned> masks_of_degree(unsigned n, unsigned r) {
  std::vector<std::vector<unsigned>> tuples;
  std::vector<unsigned> cur;
  auto rec = [&](auto&& self, unsigned start) -> void {
    if (cur.size() == r) {
      tuples.push_back(cur);
      return;
    }
    for (unsigned i = start; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  std::vector<unsigned> out;
  for (const auto& t : tuples) {
    unsigned m = 0;
    for (unsigned i : t) m |= 1u << i;
    out.push_back(m);
  }
  return out;
}

std::string mask_label(unsigned mask) {
  std::string s;
  for (unsigned i : mask_indices(mask)) s += std::to_string(i + 1);
  return s;
}

int below(unsigned mask, unsigned i) { return std::popcount(mask & ((1u << i) - 1u)); }

Scalar trace_weight(unsigned i, unsigned j) { return Scalar(i == j ? 1 : 2); }

}  // namespace

Metric::Metric(ContextPtr ctx, std::vector<std::vector<Scalar>> g) : ctx_(std::move(ctx)), g_(std::move(g)) {
  if (g_.size() != ctx_->n()) throw PreconditionError("metric size does not match the number of variables");
  for (unsigned i = 0; i < n(); ++i)
    for (unsigned j = 0; j < i; ++j)
      if (!(g_[i][j] == g_[j][i])) throw PreconditionError("metric is not symmetric");
  auto inv = invert(g_);
  if (!inv) throw PreconditionError("metric is singular");
  inv_ = std::move(*inv);
}

Metric Metric::euclidean(ContextPtr ctx) {
  unsigned n = ctx->n();
  std::vector<std::vector<Scalar>> g(n, std::vector<Scalar>(n));
  for (unsigned i = 0; i < n; ++i) g[i][i] = Scalar(1);
  return Metric(std::move(ctx), std::move(g));
}

Metric Metric::minkowski(ContextPtr ctx) {
  unsigned n = ctx->n();
  std::vector<std::vector<Scalar>> g(n, std::vector<Scalar>(n));
  for (unsigned i = 0; i < n; ++i) g[i][i] = Scalar(i + 1 == n ? -1 : 1);
  return Metric(std::move(ctx), std::move(g));
}

bool Metric::is_constant() const {
  for (const auto& row : g_)
    for (const auto& v : row)
      if (!v.is_constant()) return false;
  return true;
}

std::vector<std::pair<unsigned, unsigned>> symmetric_pairs(unsigned n) {
  std::vector<std::pair<unsigned, unsigned>> out;
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = i; j < n; ++j) out.emplace_back(i, j);
  return out;
}

std::size_t symmetric_index(unsigned n, unsigned i, unsigned j) {
  if (i > j) std::swap(i, j);
  // rows before i hold n, n-1, ..., n-i+1 entries
  return static_cast<std::size_t>(i) * n - static_cast<std::size_t>(i) * (i - 1) / 2 + (j - i);
}

DifferentialForm DifferentialForm::one_form(const std::vector<Scalar>& coeffs) {
  DifferentialForm w{static_cast<unsigned>(coeffs.size()), 1, {}};
  for (unsigned i = 0; i < coeffs.size(); ++i) w.add(1u << i, coeffs[i]);
  return w;
}

Scalar DifferentialForm::component(unsigned mask) const {
  auto it = c.find(mask);
  return it == c.end() ? Scalar() : it->second;
}

Scalar DifferentialForm::component(const std::vector<unsigned>& idx) const {
  std::vector<unsigned> v = idx;
  int sign = 1;
  // bubble sort to count transpositions, aborting on repeats
  for (std::size_t a = 0; a < v.size(); ++a)
    for (std::size_t b = 0; b + 1 < v.size() - a; ++b) {
      if (v[b] == v[b + 1]) return Scalar();
      if (v[b] > v[b + 1]) {
        std::swap(v[b], v[b + 1]);
        sign = -sign;
      }
    }
  unsigned mask = 0;
  for (unsigned i : v) {
    if (mask & (1u << i)) return Scalar();
    mask |= 1u << i;
  }
  Scalar s = component(mask);
  return sign > 0 ? s : -s;
}

void DifferentialForm::add(unsigned mask, const Scalar& v) {
  if (v.is_zero()) return;
  auto [it, fresh] = c.emplace(mask, v);
  if (!fresh) {
    it->second += v;
    if (it->second.is_zero()) c.erase(it);
  }
}

bool DifferentialForm::operator==(const DifferentialForm& o) const {
  if (n != o.n || degree != o.degree || c.size() != o.c.size()) return false;
  auto a = c.begin();
  for (auto b = o.c.begin(); b != o.c.end(); ++a, ++b)
    if (a->first != b->first || !(a->second == b->second)) return false;
  return true;
}

std::string DifferentialForm::to_string() const {
  if (c.empty()) return "0";
  std::string out;
  for (unsigned mask : masks_of_degree(n, degree)) {
    auto it = c.find(mask);
    if (it == c.end()) continue;
    std::string basis;
    for (unsigned i : mask_indices(mask)) basis += (basis.empty() ? "" : "^") + std::string("dx") + std::to_string(i + 1);
    std::string coef = it->second.to_string();
    bool neg = coef[0] == '-';
    if (neg) coef = coef.substr(1);
    bool compound = coef.find_first_of("+-") != std::string::npos;
    if (compound) coef = "(" + coef + ")";
    std::string term = basis.empty() ? coef : (coef == "1" ? basis : coef + "*" + basis);
    if (out.empty())
      out = (neg ? "-" : "") + term;
    else
      out += (neg ? " - " : " + ") + term;
  }
  return out;
}

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
  DifferentialForm out = DifferentialForm::zero(a.n, a.degree + b.degree);
  for (const auto& [ma, va] : a.c)
    for (const auto& [mb, vb] : b.c) {
      if (ma & mb) continue;
      int swaps = 0;
      for (unsigned i : mask_indices(ma)) swaps += below(mb, i);
      Scalar v = va * vb;
      out.add(ma | mb, swaps % 2 ? -v : v);
    }
  return out;
}

DifferentialForm operator+(const DifferentialForm& a, const DifferentialForm& b) {
  if (a.degree != b.degree) throw PreconditionError("adding forms of different degree");
  DifferentialForm out = a;
  for (const auto& [m, v] : b.c) out.add(m, v);
  return out;
}

DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b) {
  if (a.degree != b.degree) throw PreconditionError("subtracting forms of different degree");
  DifferentialForm out = a;
  for (const auto& [m, v] : b.c) out.add(m, -v);
  return out;
}

DifferentialForm exterior_d(const DifferentialForm& w, const DiffContext& ctx) {
  DifferentialForm out = DifferentialForm::zero(w.n, w.degree + 1);
  if (w.degree >= w.n) return out;
  for (const auto& [m, v] : w.c)
    for (unsigned i = 0; i < w.n; ++i) {
      if (m & (1u << i)) continue;
      Scalar dv = ctx.derive(v, i + 1);
      out.add(m | (1u << i), below(m, i) % 2 ? -dv : dv);
    }
  return out;
}

DifferentialForm interior(const VectorField& xi, const DifferentialForm& w) {
  if (w.degree == 0) return DifferentialForm::zero(w.n, 0);
  DifferentialForm out = DifferentialForm::zero(w.n, w.degree - 1);
  for (const auto& [m, v] : w.c)
    for (unsigned i : mask_indices(m)) {
      Scalar t = xi[i] * v;
      out.add(m & ~(1u << i), below(m, i) % 2 ? -t : t);
    }
  return out;
}

DifferentialForm lie_derivative_form(const VectorField& xi, const DifferentialForm& w, const DiffContext& ctx) {
  DifferentialForm a = interior(xi, exterior_d(w, ctx));
  if (w.degree == 0) return a;
  return a + exterior_d(interior(xi, w), ctx);
}

VectorField bracket(const VectorField& xi, const VectorField& eta, const DiffContext& ctx) {
  unsigned n = ctx.n();
  VectorField out(n);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned r = 0; r < n; ++r) out[i] += xi[r] * ctx.derive(eta[i], r + 1) - eta[r] * ctx.derive(xi[i], r + 1);
  return out;
}

OperatorMatrix lie_operator(const DifferentialForm& w, const ContextPtr& ctx, const Rational& weight) {
  unsigned n = ctx->n();
  if (w.n != n) throw PreconditionError("form dimension does not match the context");
  OperatorMatrix out(ctx, 0, n);
  for (unsigned c = 0; c < n; ++c) out.col_labels().push_back("xi" + std::to_string(c + 1));
  for (unsigned mask : masks_of_degree(n, w.degree)) {
    Row row(n);
    auto idx = mask_indices(mask);
    Scalar wi = w.component(mask);
    for (unsigned r = 0; r < n; ++r) {
      add(row, r, MultiIndex{}, ctx->derive(wi, r + 1));
      for (std::size_t a = 0; a < idx.size(); ++a) {
        auto repl = idx;
        repl[a] = r;
        add(row, r, d1(idx[a]), w.component(repl));
      }
      if (weight != 0) add(row, r, d1(r), wi * Scalar(weight));
    }
    out.append_row(row, "Omega" + mask_label(mask));
  }
  return out;
}

OperatorMatrix killing_operator(const Metric& w) {
  unsigned n = w.n();
  const auto& ctx = w.context();
  OperatorMatrix out(ctx, 0, n);
  for (unsigned c = 0; c < n; ++c) out.col_labels().push_back("xi" + std::to_string(c + 1));
  for (auto [i, j] : symmetric_pairs(n)) {
    Row row(n);
    for (unsigned r = 0; r < n; ++r) {
      add(row, r, d1(i), w(r, j));
      add(row, r, d1(j), w(i, r));
      add(row, r, MultiIndex{}, ctx->derive(w(i, j), r + 1));
    }
    out.append_row(row, "Omega" + std::to_string(i + 1) + std::to_string(j + 1));
  }
  return out;
}

OperatorMatrix conformal_killing_operator(const Metric& w) {
  unsigned n = w.n();
  OperatorMatrix k = killing_operator(w);
  auto pairs = symmetric_pairs(n);
  // trace = w^{kl} Omega_kl summed over all k, l
  Row trace(n);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    auto [a, b] = pairs[p];
    Scalar f = trace_weight(a, b) * w.inverse(a, b);
    if (f.is_zero()) continue;
    for (unsigned c = 0; c < n; ++c) trace[c] += k.at(p, c).scaled(f);
  }
  OperatorMatrix out(w.context(), 0, n);
  out.col_labels() = k.col_labels();
  Scalar inv_n = Scalar(Rational(1, n));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    auto [i, j] = pairs[p];
    Row row = k.row(p);
    Scalar f = w(i, j) * inv_n;
    if (!f.is_zero())
      for (unsigned c = 0; c < n; ++c) row[c] -= trace[c].scaled(f);
    out.append_row(row, k.row_label(p));
  }
  return out;
}

Christoffel christoffel(const Metric& w) {
  unsigned n = w.n();
  const auto& ctx = *w.context();
  // dw[r][i][j] = d_r w_ij
  std::vector<std::vector<std::vector<Scalar>>> dw(n, std::vector<std::vector<Scalar>>(n, std::vector<Scalar>(n)));
  for (unsigned r = 0; r < n; ++r)
    for (unsigned i = 0; i < n; ++i)
      for (unsigned j = 0; j < n; ++j) dw[r][i][j] = ctx.derive(w(i, j), r + 1);
  Christoffel g(n, std::vector<std::vector<Scalar>>(n, std::vector<Scalar>(n)));
  Scalar half(Rational(1, 2));
  for (unsigned k = 0; k < n; ++k)
    for (unsigned i = 0; i < n; ++i)
      for (unsigned j = i; j < n; ++j) {
        Scalar s;
        for (unsigned r = 0; r < n; ++r) {
          if (w.inverse(k, r).is_zero()) continue;
          s += w.inverse(k, r) * (dw[i][r][j] + dw[j][r][i] - dw[r][i][j]);
        }
        g[k][i][j] = g[k][j][i] = half * s;
      }
  return g;
}

RiemannTensor riemann(const Christoffel& g, const DiffContext& ctx) {
  unsigned n = static_cast<unsigned>(g.size());
  RiemannTensor rho(n, std::vector<std::vector<std::vector<Scalar>>>(
                           n, std::vector<std::vector<Scalar>>(n, std::vector<Scalar>(n))));
  for (unsigned k = 0; k < n; ++k)
    for (unsigned l = 0; l < n; ++l)
      for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j) {
          Scalar s = ctx.derive(g[k][l][j], i + 1) - ctx.derive(g[k][l][i], j + 1);
          for (unsigned r = 0; r < n; ++r) s += g[r][l][j] * g[k][r][i] - g[r][l][i] * g[k][r][j];
          rho[k][l][i][j] = s;
        }
  return rho;
}

OperatorMatrix christoffel_operator(const Metric& w) {
  unsigned n = w.n();
  const auto& ctx = w.context();
  Christoffel g = christoffel(w);
  OperatorMatrix out(ctx, 0, n);
  for (unsigned c = 0; c < n; ++c) out.col_labels().push_back("xi" + std::to_string(c + 1));
  for (unsigned k = 0; k < n; ++k)
    for (auto [i, j] : symmetric_pairs(n)) {
      Row row(n);
      add(row, k, d2(i, j), Scalar(1));
      for (unsigned s = 0; s < n; ++s) add(row, k, d1(s), -g[s][i][j]);
      for (unsigned r = 0; r < n; ++r) {
        add(row, r, d1(i), g[k][r][j]);
        add(row, r, d1(j), g[k][i][r]);
        add(row, r, MultiIndex{}, ctx->derive(g[k][i][j], r + 1));
      }
      out.append_row(row, "Gamma" + std::to_string(k + 1) + "_" + std::to_string(i + 1) + std::to_string(j + 1));
    }
  return out;
}

OperatorMatrix killing_christoffel_operator(const Metric& w) {
  OperatorMatrix out = killing_operator(w);
  OperatorMatrix c = christoffel_operator(w);
  for (std::size_t r = 0; r < c.rows(); ++r) out.append_row(c.row(r), c.row_label(r));
  return out;
}

OperatorMatrix einstein_operator(const Metric& w) {
  if (!w.is_constant()) throw PreconditionError("the linearized Einstein operator needs a constant background metric");
  unsigned n = w.n();
  auto pairs = symmetric_pairs(n);
  std::size_t m = pairs.size();
  // lower[a][b]: E_ab as a row over packed Omega
  std::vector<std::vector<Row>> lower(n, std::vector<Row>(n, Row(m)));
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = i; j < n; ++j) {
      Row& row = lower[i][j];
      auto put = [&](unsigned a, unsigned b, const MultiIndex& mu, const Scalar& c) {
        add(row, static_cast<unsigned>(symmetric_index(n, a, b)), mu, c);
      };
      for (unsigned r = 0; r < n; ++r)
        for (unsigned s = 0; s < n; ++s) {
          const Scalar& wrs = w.inverse(r, s);
          if (!wrs.is_zero()) {
            put(r, s, d2(i, j), wrs);
            put(i, j, d2(r, s), wrs);
            put(s, j, d2(r, i), -wrs);
            put(r, i, d2(s, j), -wrs);
          }
          if (w(i, j).is_zero()) continue;
          for (unsigned u = 0; u < n; ++u)
            for (unsigned v = 0; v < n; ++v) {
              Scalar c = wrs * w.inverse(u, v) - w.inverse(r, u) * w.inverse(s, v);
              if (!c.is_zero()) put(u, v, d2(r, s), -w(i, j) * c);
            }
        }
      lower[j][i] = row;
    }
  OperatorMatrix out(w.context(), 0, m);
  for (auto [a, b] : pairs) out.col_labels().push_back("Omega" + std::to_string(a + 1) + std::to_string(b + 1));
  // Rows carry upper indices E^ij = w^ia w^jb E_ab, paired with lower Omega_ij.
  for (auto [i, j] : pairs) {
    Row row(m);
    for (unsigned a = 0; a < n; ++a)
      for (unsigned b = 0; b < n; ++b) {
        Scalar f = w.inverse(i, a) * w.inverse(j, b);
        if (i != j) f *= Scalar(2);
        if (f.is_zero()) continue;
        for (std::size_t c = 0; c < m; ++c) row[c] += lower[a][b][c].scaled(f);
      }
    out.append_row(row, "E" + std::to_string(i + 1) + std::to_string(j + 1));
  }
  return out;
}

std::string kind_name(StructureKind k) {
  switch (k) {
    case StructureKind::Affine: return "affine";
    case StructureKind::Principal: return "principal";
    case StructureKind::Riemann: return "riemann";
    case StructureKind::Contact: return "contact";
    case StructureKind::UnimodularContact: return "unimodular";
  }
  return "?";
}

StructureKind parse_kind(const std::string& s) {
  if (s == "1.7" || s == "affine") return StructureKind::Affine;
  if (s == "1.8" || s == "principal") return StructureKind::Principal;
  if (s == "1.9" || s == "riemann") return StructureKind::Riemann;
  if (s == "1.10" || s == "contact") return StructureKind::Contact;
  if (s == "1.11" || s == "unimodular") return StructureKind::UnimodularContact;
  throw PreconditionError("unknown structure kind '" + s + "'");
}

namespace {

void require_n(const ContextPtr& ctx, unsigned n, StructureKind k) {
  if (ctx->n() != n)
    throw PreconditionError(kind_name(k) + " structure needs " + std::to_string(n) + " variables");
}

void require_volume(const DifferentialForm& a, const DifferentialForm& b) {
  if (a.degree != 1 || b.degree != 2) throw PreconditionError("unimodular contact data must be a 1-form and a 2-form");
  if (wedge(a, b).is_zero()) throw PreconditionError("degenerate data: alpha ^ beta = 0");
}

}  // namespace

OperatorMatrix medolaghi(StructureKind kind, const StructureData& data, const ContextPtr& ctx) {
  switch (kind) {
    case StructureKind::Affine: {
      require_n(ctx, 1, kind);
      if (data.alpha.is_zero()) throw PreconditionError("degenerate data: alpha = 0");
      OperatorMatrix out(ctx, 0, 1);
      out.col_labels() = {"xi"};
      Row a(1), g(1);
      add(a, 0, d1(0), data.alpha);
      add(a, 0, MultiIndex{}, ctx->derive(data.alpha, 1));
      add(g, 0, d2(0, 0), Scalar(1));
      add(g, 0, d1(0), data.gamma);
      add(g, 0, MultiIndex{}, ctx->derive(data.gamma, 1));
      out.append_row(a, "L_alpha");
      out.append_row(g, "L_gamma");
      return out;
    }
    case StructureKind::Principal: {
      unsigned n = ctx->n();
      if (data.frames.size() != n) throw PreconditionError("principal structure needs n 1-forms");
      if (!invert(data.frames)) throw PreconditionError("degenerate data: det(w) = 0");
      OperatorMatrix out(ctx, 0, n);
      for (unsigned c = 0; c < n; ++c) out.col_labels().push_back("xi" + std::to_string(c + 1));
      for (unsigned t = 0; t < n; ++t) {
        OperatorMatrix l = lie_operator(DifferentialForm::one_form(data.frames[t]), ctx);
        for (unsigned i = 0; i < n; ++i)
          out.append_row(l.row(i), "Omega" + std::to_string(t + 1) + "_" + std::to_string(i + 1));
      }
      return out;
    }
    case StructureKind::Riemann:
      return killing_operator(Metric(ctx, data.metric));
    case StructureKind::Contact: {
      require_n(ctx, 3, kind);
      if (data.density.size() != 3) throw PreconditionError("contact structure needs a density with 3 components");
      return lie_operator(DifferentialForm::one_form(data.density), ctx, Rational(-1, 2));
    }
    case StructureKind::UnimodularContact: {
      require_n(ctx, 3, kind);
      require_volume(data.one, data.two);
      OperatorMatrix out = lie_operator(data.one, ctx);
      OperatorMatrix b = lie_operator(data.two, ctx);
      for (std::size_t r = 0; r < out.rows(); ++r) out.row_labels()[r] = "A" + out.row_label(r).substr(5);
      for (std::size_t r = 0; r < b.rows(); ++r) out.append_row(b.row(r), "B" + b.row_label(r).substr(5));
      return out;
    }
  }
  throw PreconditionError("unknown structure kind");
}

namespace {

// Records a constant or the first non-constant expression.
bool record(StructureConstantsRecord& rec, const std::string& name, const Scalar& v) {
  if (!v.is_constant()) {
    rec.constant = false;
    if (rec.obstruction.empty()) rec.obstruction = name + " = " + v.to_string();
    return false;
  }
  rec.constants.emplace_back(name, v.constant());
  return true;
}

}  // namespace

StructureConstantsRecord vessiot_constants(StructureKind kind, const StructureData& data, const ContextPtr& ctx) {
  StructureConstantsRecord rec;
  rec.kind = kind;
  rec.constant = true;
  const DiffContext& c = *ctx;
  switch (kind) {
    case StructureKind::Affine: {
      require_n(ctx, 1, kind);
      if (data.alpha.is_zero()) throw PreconditionError("degenerate data: alpha = 0");
      Scalar v = (c.derive(data.alpha, 1) - data.gamma * data.alpha) / (data.alpha * data.alpha);
      record(rec, "c", v);
      break;
    }
    case StructureKind::Principal: {
      unsigned n = c.n();
      auto inv = data.frames.size() == n ? invert(data.frames) : std::nullopt;
      if (!inv) throw PreconditionError("degenerate data: det(w) = 0");
      const auto& a = *inv;  // a[i][rho] = alpha^i_rho
      rec.n = n;
      rec.tensor.assign(static_cast<std::size_t>(n) * n * n, Rational(0));
      for (unsigned t = 0; t < n; ++t) {
        // F_ij = d_i w^t_j - d_j w^t_i
        std::vector<std::vector<Scalar>> f(n, std::vector<Scalar>(n));
        for (unsigned i = 0; i < n; ++i)
          for (unsigned j = 0; j < n; ++j) f[i][j] = c.derive(data.frames[t][j], i + 1) - c.derive(data.frames[t][i], j + 1);
        for (unsigned r = 0; r < n; ++r)
          for (unsigned s = r + 1; s < n; ++s) {
            Scalar v;
            for (unsigned i = 0; i < n; ++i)
              for (unsigned j = 0; j < n; ++j)
                if (!f[i][j].is_zero()) v += a[i][r] * a[j][s] * f[i][j];
            std::string name = "c^" + std::to_string(t + 1) + "_" + std::to_string(r + 1) + std::to_string(s + 1);
            if (record(rec, name, v)) {
              rec.tensor[(t * n + r) * n + s] = v.constant();
              rec.tensor[(t * n + s) * n + r] = -v.constant();
            }
          }
      }
      break;
    }
    case StructureKind::Riemann:
      return constant_curvature_check(Metric(ctx, data.metric));
    case StructureKind::Contact: {
      require_n(ctx, 3, kind);
      if (data.density.size() != 3) throw PreconditionError("contact structure needs a density with 3 components");
      const auto& w = data.density;
      auto d = [&](unsigned k, unsigned i) { return c.derive(w[k - 1], i); };
      Scalar v = w[0] * (d(3, 2) - d(2, 3)) + w[1] * (d(1, 3) - d(3, 1)) + w[2] * (d(2, 1) - d(1, 2));
      record(rec, "c", v);
      break;
    }
    case StructureKind::UnimodularContact: {
      require_n(ctx, 3, kind);
      require_volume(data.one, data.two);
      DifferentialForm da = exterior_d(data.one, c);
      DifferentialForm db = exterior_d(data.two, c);
      DifferentialForm vol = wedge(data.one, data.two);
      // c' from a nonzero component of beta, then proportionality check
      auto lead = data.two.c.begin();
      Scalar c1 = da.component(lead->first) / lead->second;
      DifferentialForm scaled = DifferentialForm::zero(3, 2);
      for (const auto& [m, v] : data.two.c) scaled.add(m, v * c1);
      if (!(da == scaled)) {
        rec.constant = false;
        rec.obstruction = "d(alpha) = " + da.to_string() + " is not proportional to beta";
        break;
      }
      record(rec, "c'", c1);
      Scalar c2 = db.component(7u) / vol.component(7u);
      record(rec, "c''", c2);
      break;
    }
  }
  return rec;
}

StructureConstantsRecord constant_curvature_check(const Metric& w) {
  StructureConstantsRecord rec;
  rec.kind = StructureKind::Riemann;
  unsigned n = w.n();
  RiemannTensor rho = riemann(christoffel(w), *w.context());
  auto delta = [](unsigned a, unsigned b) { return a == b ? Scalar(1) : Scalar(); };
  auto shape = [&](unsigned k, unsigned l, unsigned i, unsigned j) {
    return delta(k, i) * w(l, j) - delta(k, j) * w(l, i);
  };
  std::optional<Scalar> c;
  for (unsigned k = 0; k < n && !c; ++k)
    for (unsigned l = 0; l < n && !c; ++l)
      for (unsigned i = 0; i < n && !c; ++i)
        for (unsigned j = 0; j < n && !c; ++j) {
          Scalar e = shape(k, l, i, j);
          if (!e.is_zero()) c = rho[k][l][i][j] / e;
        }
  if (!c) c = Scalar();
  for (unsigned k = 0; k < n; ++k)
    for (unsigned l = 0; l < n; ++l)
      for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j) {
          Scalar defect = rho[k][l][i][j] - *c * shape(k, l, i, j);
          if (!defect.is_zero()) {
            rec.constant = false;
            rec.obstruction = "rho^" + std::to_string(k + 1) + "_" + std::to_string(l + 1) + std::to_string(i + 1) +
                              std::to_string(j + 1) + " is not of constant curvature form: defect " + defect.to_string();
            return rec;
          }
        }
  rec.constant = true;
  record(rec, "c", *c);
  return rec;
}

bool jacobi_check(const StructureConstantsRecord& r) {
  if (!r.constant) return false;
  if (r.kind == StructureKind::UnimodularContact) {
    Rational a = 0, b = 0;
    for (const auto& [name, v] : r.constants) {
      if (name == "c'") a = v;
      if (name == "c''") b = v;
    }
    return a * b == 0;
  }
  if (r.kind != StructureKind::Principal) return true;
  unsigned n = r.n;
  auto c = [&](unsigned t, unsigned a, unsigned b) -> const Rational& { return r.tensor[(t * n + a) * n + b]; };
  for (unsigned l = 0; l < n; ++l)
    for (unsigned p = 0; p < n; ++p)
      for (unsigned s = 0; s < n; ++s)
        for (unsigned t = 0; t < n; ++t) {
          Rational sum = 0;
          for (unsigned m = 0; m < n; ++m)
            sum += c(l, m, p) * c(m, s, t) + c(l, m, s) * c(m, t, p) + c(l, m, t) * c(m, p, s);
          if (sum != 0) return false;
        }
  return true;
}

}  // namespace dmod
