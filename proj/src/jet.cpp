#include "dmod/jet.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "dmod/errors.hpp"

namespace dmod {

namespace {

std::uint64_t jet_key(const JetCoord& c) {
  std::uint64_t k = static_cast<std::uint64_t>(std::min(c.mu.order(), 255u)) << 52;
  unsigned shift = 44;
  for (unsigned j = kMaxVars; j >= 2; --j) {
    k |= static_cast<std::uint64_t>(255 - c.mu.c[j - 1]) << shift;
    shift -= 8;
  }
  k |= static_cast<std::uint64_t>(4095 - c.col) & 0xFFF;
  return k;
}

void axpy(JetEquation& y, const Scalar& a, const JetEquation& x) {
  for (const auto& [k, v] : x) {
    auto [it, fresh] = y.try_emplace(k, a * v);
    if (!fresh) {
      it->second += a * v;
      if (it->second.is_zero()) y.erase(it);
    }
  }
}

// Fully reduced echelon form; pivots are leading coordinates under JetOrder.
struct Echelon {
  std::map<JetCoord, JetEquation, JetOrder> rows;

  struct Added {
    JetCoord pivot;
    JetEquation reduced;  // before normalization
  };

  std::optional<Added> add(JetEquation r) {
    std::vector<JetCoord> hits;
    for (const auto& [k, v] : r)
      if (rows.count(k)) hits.push_back(k);
    for (const auto& k : hits) {
      auto it = r.find(k);
      if (it == r.end()) continue;
      Scalar c = it->second;
      axpy(r, -c, rows.at(k));
    }
    if (r.empty()) return std::nullopt;
    Added out{r.begin()->first, r};
    Scalar inv = r.begin()->second.inverse();
    for (auto& [k, v] : r) v *= inv;
    for (auto& [k, other] : rows) {
      auto it = other.find(out.pivot);
      if (it == other.end()) continue;
      Scalar f = it->second;
      axpy(other, -f, r);
    }
    rows.emplace(out.pivot, std::move(r));
    return out;
  }
};

bool param_less(const JetCoord& a, const JetCoord& b) {
  if (a.mu.order() != b.mu.order()) return a.mu.order() < b.mu.order();
  return JetOrder{}(a, b);
}

// Multiplies by the lcm of the denominators.
JetEquation clear_denominators(JetEquation e) {
  Polynomial l(1);
  for (const auto& [k, v] : e) {
    Polynomial d = v.denominator();
    if (d.is_constant()) continue;
    Polynomial g = gcd(l, d);
    l = l * *d.divide_exact(g);
  }
  Scalar f(l);
  for (auto& [k, v] : e) v *= f;
  // Positive leading coefficient.
  Rational lc = e.empty() ? Rational(1) : e.begin()->second.numerator().leading_coefficient();
  if (lc < 0)
    for (auto& [k, v] : e) v = -v;
  return e;
}

// Derivatives d_nu of every equation with |nu| == level, built without repeats.
std::vector<JetEquation> next_level(const std::vector<std::pair<JetEquation, unsigned>>& prev, const DiffContext& ctx,
                                    std::vector<std::pair<JetEquation, unsigned>>& out) {
  out.clear();
  std::vector<JetEquation> eqs;
  for (const auto& [e, last] : prev)
    for (unsigned i = std::max(last, 1u); i <= ctx.n(); ++i) {
      JetEquation d = formal_derivative(e, i, ctx);
      out.emplace_back(d, i);
      if (!d.empty()) eqs.push_back(std::move(d));
    }
  return eqs;
}

QMatrix evaluate_at(const KMatrix& m, const Assignment& point) {
  QMatrix out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.a.size(); ++i)
    if (!m.a[i].is_zero()) out.a[i] = m.a[i].evaluate(point);
  return out;
}

std::vector<SymbolId> symbols_of(const KMatrix& m, const DiffContext* ctx) {
  std::vector<SymbolId> out;
  if (ctx) out = ctx->all_symbols();
  for (const auto& s : m.a)
    for (auto id : s.symbols()) out.push_back(id);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Top-order rows of prolong(r, level) over the coordinates of S_{q+level}.
KMatrix symbol_rows(const JetSystem& r, unsigned level, std::vector<JetCoord>& coords) {
  unsigned s = r.q() + level;
  coords = jet_coordinates(r.n(), r.m(), s, true);
  std::map<JetCoord, std::size_t, JetOrder> index;
  for (std::size_t i = 0; i < coords.size(); ++i) index[coords[i]] = i;
  auto shifts = multi_indices_of_order(r.n(), level);
  KMatrix out(0, coords.size());
  for (const auto& e : r.equations()) {
    if (equation_order(e) != static_cast<int>(r.q())) continue;
    for (const auto& nu : shifts) {
      std::vector<Scalar> row(coords.size());
      for (const auto& [c, a] : e)
        if (c.mu.order() == r.q()) row[index.at(JetCoord{c.col, c.mu + nu})] = a;
      out.append_row(row);
    }
  }
  return out;
}

std::size_t count_masks(unsigned n, unsigned p) { return static_cast<std::size_t>(binomial(n, p)); }

std::vector<std::vector<Rational>> identity_basis(std::size_t d) {
  std::vector<std::vector<Rational>> b(d, std::vector<Rational>(d));
  for (std::size_t i = 0; i < d; ++i) b[i][i] = 1;
  return b;
}

}  // namespace

bool JetOrder::operator()(const JetCoord& a, const JetCoord& b) const { return jet_key(a) > jet_key(b); }

int equation_order(const JetEquation& e) { return e.empty() ? -1 : static_cast<int>(e.begin()->first.mu.order()); }

JetSystem::JetSystem(ContextPtr ctx, unsigned m, unsigned q, std::vector<std::string> unknowns)
    : ctx_(std::move(ctx)), m_(m), q_(q), names_(std::move(unknowns)) {
  if (names_.empty())
    for (unsigned k = 1; k <= m_; ++k) names_.push_back("y" + std::to_string(k));
  if (names_.size() != m_) throw PreconditionError("unknown names do not match the number of unknowns");
}

JetSystem JetSystem::from_operator(const OperatorMatrix& d, int q) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < d.cols(); ++c) names.push_back(d.col_label(c));
  unsigned order = static_cast<unsigned>(q >= 0 ? q : std::max(d.order(), 0));
  JetSystem out(d.context(), static_cast<unsigned>(d.cols()), order, names);
  for (std::size_t r = 0; r < d.rows(); ++r) {
    JetEquation e;
    for (std::size_t c = 0; c < d.cols(); ++c)
      for (const auto& [mu, a] : d.at(r, c).terms()) e[JetCoord{static_cast<unsigned>(c), mu}] += a;
    out.add(std::move(e));
  }
  return out;
}

void JetSystem::add(JetEquation e) {
  for (auto it = e.begin(); it != e.end();) it = it->second.is_zero() ? e.erase(it) : std::next(it);
  if (e.empty()) return;
  if (equation_order(e) > static_cast<int>(q_)) throw PreconditionError("equation order exceeds system order");
  eqs_.push_back(std::move(e));
}

std::string JetSystem::coordinate_name(const JetCoord& c) const {
  std::string s = names_.at(c.col);
  if (c.mu.order() == 0) return s;
  s += "_";
  for (unsigned i = 0; i < kMaxVars; ++i)
    for (unsigned k = 0; k < c.mu.c[i]; ++k) s += std::to_string(i + 1);
  return s;
}

std::string JetSystem::to_string(const JetEquation& e) const {
  std::string out;
  for (const auto& [c, a] : e) {
    std::string coef = a.to_string();
    bool neg = !coef.empty() && coef[0] == '-' && (a.is_constant() || a.numerator().terms().size() == 1);
    if (neg) coef = coef.substr(1);
    bool compound = !a.is_constant() && (a.numerator().terms().size() > 1 || !a.denominator().is_constant());
    std::string term = coef == "1" ? coordinate_name(c)
                                   : (compound && coef.front() != '(' ? "(" + coef + ")" : coef) + "*" + coordinate_name(c);
    if (out.empty()) {
      out = neg ? "-" + term : term;
    } else {
      out += neg ? " - " + term : " + " + term;
    }
  }
  return (out.empty() ? "0" : out) + " = 0";
}

OperatorMatrix JetSystem::to_operator() const {
  OperatorMatrix out(ctx_, 0, m_);
  for (const auto& e : eqs_) {
    Row row(m_);
    for (const auto& [c, a] : e) row[c.col].add_term(c.mu, a);
    out.append_row(row);
  }
  out.col_labels() = names_;
  return out;
}

std::vector<JetCoord> jet_coordinates(unsigned n, unsigned m, unsigned q, bool exact_order) {
  std::vector<JetCoord> out;
  auto mus = exact_order ? multi_indices_of_order(n, q) : multi_indices_up_to(n, q);
  for (const auto& mu : mus)
    for (unsigned k = 0; k < m; ++k) out.push_back({k, mu});
  std::sort(out.begin(), out.end(), JetOrder{});
  return out;
}

std::size_t jet_dimension(unsigned n, unsigned m, unsigned q) { return m * static_cast<std::size_t>(binomial(n + q, q)); }

JetEquation formal_derivative(const JetEquation& e, unsigned i, const DiffContext& ctx) {
  JetEquation out;
  for (const auto& [c, a] : e) {
    axpy(out, a, JetEquation{{JetCoord{c.col, c.mu.plus(i)}, Scalar(1)}});
    Scalar da = ctx.derive(a, i);
    if (!da.is_zero()) axpy(out, da, JetEquation{{c, Scalar(1)}});
  }
  return out;
}

JetSystem prolong(const JetSystem& r, unsigned steps) {
  JetSystem out(r.context(), r.m(), r.q() + steps, r.unknowns());
  std::vector<std::pair<JetEquation, unsigned>> level, next;
  for (const auto& e : r.equations()) {
    out.add(e);
    level.emplace_back(e, 1);
  }
  for (unsigned s = 1; s <= steps; ++s) {
    for (auto& e : next_level(level, r.ctx(), next)) out.add(std::move(e));
    std::swap(level, next);
  }
  return out;
}

JetSystem project(const JetSystem& r, unsigned s) {
  if (s >= r.q()) throw PreconditionError("projection order must be below the system order");
  Echelon ech;
  for (const auto& e : r.equations()) ech.add(e);
  JetSystem out(r.context(), r.m(), s, r.unknowns());
  for (auto it = ech.rows.rbegin(); it != ech.rows.rend(); ++it)
    if (it->first.mu.order() <= s) out.add(clear_denominators(it->second));
  return out;
}

std::vector<Scalar> SolvedForm::express(const JetCoord& c) const {
  for (std::size_t p = 0; p < parametric.size(); ++p)
    if (parametric[p] == c) {
      std::vector<Scalar> v(parametric.size());
      v[p] = Scalar(1);
      return v;
    }
  auto it = principal.find(c);
  if (it == principal.end()) throw PreconditionError("jet coordinate beyond the solved order");
  return it->second;
}

SolvedForm solve_system(const JetSystem& r) {
  Echelon ech;
  for (const auto& e : r.equations()) ech.add(e);
  SolvedForm out;
  for (const auto& c : jet_coordinates(r.n(), r.m(), r.q()))
    if (!ech.rows.count(c)) out.parametric.push_back(c);
  std::sort(out.parametric.begin(), out.parametric.end(), param_less);
  for (const auto& [pivot, row] : ech.rows) {
    std::vector<Scalar> v(out.parametric.size());
    for (std::size_t p = 0; p < out.parametric.size(); ++p) {
      auto it = row.find(out.parametric[p]);
      if (it != row.end()) v[p] = -it->second;
    }
    out.principal.emplace(pivot, std::move(v));
  }
  return out;
}

PointSampler::PointSampler(const DiffContext& ctx, std::uint64_t seed) : symbols_(ctx.all_symbols()), seed_(seed) {}

GenericPoint PointSampler::next() {
  GenericPoint p;
  p.seed = seed_;
  p.attempt = attempt_;
  std::mt19937_64 rng(seed_ + 0x9E3779B97F4A7C15ull * attempt_);
  ++attempt_;
  std::uniform_int_distribution<int> num(2, 41), den(1, 7), sign(0, 1);
  // Sorted symbol ids keep the draw independent of insertion order.
  std::vector<SymbolId> syms = symbols_;
  std::sort(syms.begin(), syms.end());
  for (auto s : syms) {
    Rational v(num(rng), den(rng));
    v.canonicalize();
    if (sign(rng)) v = -v;
    p.values[s] = v;
  }
  return p;
}

QMatrix evaluate_generic(const KMatrix& m, PointSampler& sampler, GenericPoint* used) {
  auto syms = symbols_of(m, nullptr);
  for (int attempt = 0; attempt < 5; ++attempt) {
    GenericPoint p = sampler.next();
    std::mt19937_64 rng(p.seed ^ (p.attempt + 1));
    for (auto s : syms)
      if (!p.values.count(s)) p.values[s] = Rational(static_cast<long>(rng() % 37) + 2);
    try {
      QMatrix q = evaluate_at(m, p.values);
      if (used) *used = p;
      return q;
    } catch (const PoleError&) {
    }
  }
  throw PoleError("no pole-free evaluation point found in 5 attempts");
}

SymbolSpace symbol(const JetSystem& r, unsigned level, std::uint64_t seed) {
  auto fam = symbol_family(r, level, seed);
  return fam.back();
}

std::vector<SymbolSpace> symbol_family(const JetSystem& r, unsigned levels, std::uint64_t seed) {
  unsigned top = r.q() + levels;
  std::vector<std::vector<JetCoord>> coords(top + 1);
  std::vector<KMatrix> mats(top + 1);
  for (unsigned s = r.q(); s <= top; ++s) mats[s] = symbol_rows(r, s - r.q(), coords[s]);
  for (unsigned s = 0; s < r.q(); ++s) coords[s] = jet_coordinates(r.n(), r.m(), s, true);

  // One point for the whole family, and a second one to confirm the dimensions.
  KMatrix joint(0, 1);
  for (unsigned s = r.q(); s <= top; ++s)
    for (const auto& v : mats[s].a) joint.append_row({v});
  PointSampler sampler(r.ctx(), seed);
  auto run = [&](GenericPoint& pt) {
    evaluate_generic(joint, sampler, &pt);
    std::vector<SymbolSpace> fam(top + 1);
    for (unsigned s = 0; s <= top; ++s) {
      fam[s].order = s;
      fam[s].coords = coords[s];
      fam[s].point = pt;
      if (s < r.q()) {
        fam[s].equations = QMatrix(0, coords[s].size());
        fam[s].basis = identity_basis(coords[s].size());
      } else {
        fam[s].equations = evaluate_at(mats[s], pt.values);
        fam[s].basis = kernel(fam[s].equations);
      }
    }
    return fam;
  };
  GenericPoint p1, p2;
  auto first = run(p1);
  auto second = run(p2);
  bool same = true;
  std::size_t d1 = 0, d2 = 0;
  for (unsigned s = 0; s <= top; ++s) {
    same = same && first[s].dim() == second[s].dim();
    d1 += first[s].dim();
    d2 += second[s].dim();
  }
  auto& pick = d2 < d1 ? second : first;
  for (auto& g : pick) g.confirmed = same;
  return pick;
}

std::vector<unsigned> form_masks(unsigned n, unsigned p) {
  std::vector<unsigned> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask)
    if (static_cast<unsigned>(__builtin_popcount(mask)) == p) out.push_back(mask);
  // Lexicographic order of the index tuples.
  std::sort(out.begin(), out.end(), [](unsigned a, unsigned b) {
    while (a && b) {
      unsigned la = static_cast<unsigned>(__builtin_ctz(a)), lb = static_cast<unsigned>(__builtin_ctz(b));
      if (la != lb) return la < lb;
      a &= a - 1;
      b &= b - 1;
    }
    return false;
  });
  return out;
}

QMatrix delta_map(unsigned n, unsigned m, unsigned p, unsigned s) {
  auto src_masks = form_masks(n, p);
  auto src_coords = jet_coordinates(n, m, s, true);
  if (s == 0 || p >= n) return QMatrix(0, src_masks.size() * src_coords.size());
  auto dst_masks = form_masks(n, p + 1);
  auto dst_coords = jet_coordinates(n, m, s - 1, true);
  std::map<unsigned, std::size_t> mask_pos;
  for (std::size_t i = 0; i < dst_masks.size(); ++i) mask_pos[dst_masks[i]] = i;
  std::map<JetCoord, std::size_t, JetOrder> coord_pos;
  for (std::size_t i = 0; i < dst_coords.size(); ++i) coord_pos[dst_coords[i]] = i;
  QMatrix out(dst_masks.size() * dst_coords.size(), src_masks.size() * src_coords.size());
  for (std::size_t a = 0; a < src_masks.size(); ++a)
    for (std::size_t b = 0; b < src_coords.size(); ++b) {
      unsigned mask = src_masks[a];
      const JetCoord& c = src_coords[b];
      for (unsigned i = 1; i <= n; ++i) {
        if (mask & (1u << (i - 1)) || c.mu[i] == 0) continue;
        unsigned below = static_cast<unsigned>(__builtin_popcount(mask & ((1u << (i - 1)) - 1)));
        JetCoord t{c.col, c.mu - MultiIndex::unit(i)};
        std::size_t row = mask_pos.at(mask | (1u << (i - 1))) * dst_coords.size() + coord_pos.at(t);
        out(row, a * src_coords.size() + b) += below % 2 ? -1 : 1;
      }
    }
  return out;
}

QMatrix delta_map(const SymbolSpace& g, unsigned n, unsigned m, unsigned p) {
  QMatrix full = delta_map(n, m, p, g.order);
  std::size_t nm = count_masks(n, p);
  std::size_t dc = g.coords.size();
  QMatrix out(full.rows, nm * g.dim());
  for (std::size_t a = 0; a < nm; ++a)
    for (std::size_t b = 0; b < g.dim(); ++b)
      for (std::size_t r = 0; r < full.rows; ++r) {
        Rational acc = 0;
        for (std::size_t k = 0; k < dc; ++k)
          if (g.basis[b][k] != 0) acc += full(r, a * dc + k) * g.basis[b][k];
        out(r, a * g.dim() + b) = acc;
      }
  return out;
}

const DeltaEntry* DeltaReport::at(unsigned p, unsigned s) const {
  for (const auto& e : entries)
    if (e.p == p && e.s == s) return &e;
  return nullptr;
}

DeltaReport delta_cohomology(const std::vector<SymbolSpace>& family, unsigned n, unsigned m) {
  DeltaReport rep;
  for (std::size_t s = 0; s + 1 < family.size(); ++s)
    for (unsigned p = 0; p <= n; ++p) {
      DeltaEntry e;
      e.p = p;
      e.s = static_cast<unsigned>(s);
      std::size_t dim = count_masks(n, p) * family[s].dim();
      e.z = dim - (dim ? rank(delta_map(family[s], n, m, p)) : 0);
      e.b = p == 0 ? 0 : rank(delta_map(family[s + 1], n, m, p - 1));
      e.h = e.z - e.b;
      rep.entries.push_back(e);
    }
  return rep;
}

namespace {

// Symbol rows under the linear change chi -> A chi, as coefficient rows over S_s T* x E.
QMatrix change_coordinates(const QMatrix& rows, const std::vector<JetCoord>& coords, unsigned n, unsigned m,
                           const std::vector<std::vector<Rational>>& a) {
  std::vector<SymbolId> chi;
  for (unsigned i = 1; i <= n; ++i) chi.push_back(intern("chi" + std::to_string(i)));
  std::vector<Polynomial> image(n);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < n; ++j)
      if (a[i][j] != 0) image[i] += Polynomial::variable(chi[j]).scaled(a[i][j]);
  std::map<MultiIndex, Polynomial> cache;
  auto power = [&](const MultiIndex& mu) {
    auto it = cache.find(mu);
    if (it != cache.end()) return it->second;
    Polynomial p(1);
    for (unsigned i = 0; i < n; ++i)
      for (unsigned k = 0; k < mu.c[i]; ++k) p = p * image[i];
    cache[mu] = p;
    return p;
  };
  std::map<JetCoord, std::size_t, JetOrder> pos;
  for (std::size_t i = 0; i < coords.size(); ++i) pos[coords[i]] = i;
  QMatrix out(rows.rows, rows.cols);
  for (std::size_t r = 0; r < rows.rows; ++r) {
    std::vector<Polynomial> per(m);
    for (std::size_t c = 0; c < coords.size(); ++c)
      if (rows(r, c) != 0) per[coords[c].col] += power(coords[c].mu).scaled(rows(r, c));
    for (unsigned k = 0; k < m; ++k)
      for (const auto& t : per[k].terms()) {
        MultiIndex mu;
        for (unsigned i = 0; i < n; ++i) mu.c[i] = static_cast<std::uint8_t>(t.mono.exponent(chi[i]));
        out(r, pos.at(JetCoord{k, mu})) += t.coef;
      }
  }
  return out;
}

struct ClassCount {
  std::vector<std::size_t> beta;
  std::size_t prolonged_rank = 0;
  std::size_t bound = 0;
};

ClassCount count_classes(const QMatrix& rows, const std::vector<JetCoord>& coords, unsigned n, unsigned m,
                         unsigned s) {
  ClassCount out;
  out.beta.assign(n, 0);
  // Columns of highest class first.
  std::vector<std::size_t> perm(coords.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return coords[a].mu.cls() > coords[b].mu.cls(); });
  QMatrix sorted(rows.rows, rows.cols);
  for (std::size_t r = 0; r < rows.rows; ++r)
    for (std::size_t c = 0; c < perm.size(); ++c) sorted(r, c) = rows(r, perm[c]);
  for (auto pc : rref(sorted)) {
    unsigned cls = coords[perm[pc]].mu.cls();
    if (cls == 0) cls = n;  // order zero symbols: no derivative, count as top class
    ++out.beta[cls - 1];
  }
  for (unsigned i = 1; i <= n; ++i) out.bound += i * out.beta[i - 1];

  auto up = jet_coordinates(n, m, s + 1, true);
  std::map<JetCoord, std::size_t, JetOrder> pos;
  for (std::size_t i = 0; i < up.size(); ++i) pos[up[i]] = i;
  QMatrix prolonged(0, up.size());
  for (std::size_t r = 0; r < rows.rows; ++r)
    for (unsigned i = 1; i <= n; ++i) {
      std::vector<Rational> row(up.size());
      for (std::size_t c = 0; c < coords.size(); ++c)
        if (rows(r, c) != 0) row[pos.at(JetCoord{coords[c].col, coords[c].mu.plus(i)})] = rows(r, c);
      prolonged.append_row(row);
    }
  out.prolonged_rank = rank(prolonged);
  return out;
}

ClassReport classes_of_rows(const QMatrix& rows, const std::vector<JetCoord>& coords, unsigned n, unsigned m,
                            unsigned s, std::uint64_t seed) {
  // Independent rows only.
  QMatrix red = rows;
  auto piv = rref(red);
  QMatrix base(piv.size(), red.cols);
  for (std::size_t r = 0; r < piv.size(); ++r)
    for (std::size_t c = 0; c < red.cols; ++c) base(r, c) = red(r, c);

  auto report = [&](const ClassCount& cc, bool changed) {
    ClassReport rep;
    rep.beta = cc.beta;
    rep.prolonged_rank = cc.prolonged_rank;
    rep.cartan_bound = cc.bound;
    rep.cartan = cc.prolonged_rank == cc.bound;
    for (unsigned i = 1; i <= n; ++i) rep.cc_count += (n - i) * cc.beta[i - 1];
    rep.coordinates_changed = changed;
    return rep;
  };

  ClassCount plain = count_classes(base, coords, n, m, s);
  if (plain.prolonged_rank == plain.bound || base.rows == 0) return report(plain, false);

  std::vector<unsigned> order(n);
  std::iota(order.begin(), order.end(), 0);
  while (std::next_permutation(order.begin(), order.end())) {
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
    for (unsigned i = 0; i < n; ++i) a[i][order[i]] = 1;
    ClassCount cc = count_classes(change_coordinates(base, coords, n, m, a), coords, n, m, s);
    if (cc.prolonged_rank == cc.bound) return report(cc, true);
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> entry(-3, 3);
  for (int attempt = 0; attempt < 20; ++attempt) {
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
    for (unsigned i = 0; i < n; ++i)
      for (unsigned j = 0; j < n; ++j) a[i][j] = i == j ? 1 : entry(rng);
    QMatrix check(n, n);
    for (unsigned i = 0; i < n; ++i)
      for (unsigned j = 0; j < n; ++j) check(i, j) = a[i][j];
    if (rank(check) < n) continue;
    ClassCount cc = count_classes(change_coordinates(base, coords, n, m, a), coords, n, m, s);
    if (cc.prolonged_rank == cc.bound) return report(cc, true);
  }
  return report(plain, false);
}

ClassReport classes_at_level(const JetSystem& r, unsigned level, std::uint64_t seed) {
  std::vector<JetCoord> coords;
  KMatrix rows = symbol_rows(r, level, coords);
  PointSampler sampler(r.ctx(), seed);
  GenericPoint pt;
  QMatrix q = evaluate_generic(rows, sampler, &pt);
  ClassReport rep = classes_of_rows(q, coords, r.n(), r.m(), r.q() + level, seed);
  rep.point = pt;
  return rep;
}

}  // namespace

ClassReport involutivity_classes(const JetSystem& r, std::uint64_t seed) { return classes_at_level(r, 0, seed); }

FIReport formal_integrability_test(const JetSystem& r, unsigned steps, std::uint64_t seed) {
  if (steps < 1) throw PreconditionError("formal integrability test needs at least one step");
  FIReport rep;
  Echelon ech;
  std::vector<std::pair<JetEquation, unsigned>> level, next;
  for (const auto& e : r.equations()) {
    ech.add(e);
    level.emplace_back(e, 1);
  }
  bool all_clean = true;
  for (unsigned s = 0; s <= steps; ++s) {
    FIStep st;
    st.r = s;
    unsigned bound = r.q() + s;
    for (auto& e : next_level(level, r.ctx(), next)) {
      auto added = ech.add(std::move(e));
      if (!added || added->pivot.mu.order() > bound) continue;
      int o = static_cast<int>(added->pivot.mu.order());
      if (st.clean || o < st.new_order) {
        st.new_order = o;
        st.equation = clear_denominators(added->reduced);
        st.new_equation = r.to_string(st.equation);
      }
      st.clean = false;
    }
    std::swap(level, next);
    st.symbol_involutive = classes_at_level(r, s, seed).cartan;
    all_clean = all_clean && st.clean;
    rep.steps.push_back(st);
    if (!all_clean) break;
    if (st.symbol_involutive && rep.involutive_at < 0) {
      rep.involutive_at = static_cast<int>(s);
      rep.formally_integrable = true;
      break;
    }
  }
  return rep;
}

DimTable bundle_dims(const JetSystem& r, std::uint64_t seed) {
  unsigned n = r.n(), m = r.m(), q = r.q();
  DimTable t;
  t.n = n;
  t.m = m;
  t.q = q;
  t.jq = jet_dimension(n, m, q);
  auto coords = jet_coordinates(n, m, q);
  std::map<JetCoord, std::size_t, JetOrder> pos;
  for (std::size_t i = 0; i < coords.size(); ++i) pos[coords[i]] = i;
  KMatrix eqs(0, coords.size());
  for (const auto& e : r.equations()) {
    std::vector<Scalar> row(coords.size());
    for (const auto& [c, a] : e) row[pos.at(c)] = a;
    eqs.append_row(row);
  }
  PointSampler sampler(r.ctx(), seed);
  QMatrix q_eqs = evaluate_generic(eqs, sampler, &t.point);
  auto rq_basis = kernel(q_eqs);
  t.rq = rq_basis.size();
  auto fam = symbol_family(r, 1, seed);
  t.gq = fam[q].dim();
  t.gq1 = fam[q + 1].dim();

  // Order q coordinates of S_q inside J_q.
  auto sq = jet_coordinates(n, m, q, true);
  for (unsigned p = 0; p <= n; ++p) {
    std::size_t nm = count_masks(n, p);
    std::size_t delta_g = 0, delta_full = 0;
    QMatrix span(0, nm * t.jq);
    if (p > 0) {
      delta_g = rank(delta_map(fam[q + 1], n, m, p - 1));
      QMatrix full = delta_map(n, m, p - 1, q + 1);
      delta_full = rank(full);
      for (std::size_t c = 0; c < full.cols; ++c) {
        std::vector<Rational> v(nm * t.jq);
        for (std::size_t row = 0; row < full.rows; ++row) {
          if (full(row, c) == 0) continue;
          std::size_t mask = row / sq.size(), k = row % sq.size();
          v[mask * t.jq + pos.at(sq[k])] = full(row, c);
        }
        span.append_row(v);
      }
    }
    for (std::size_t mask = 0; mask < nm; ++mask)
      for (const auto& b : rq_basis) {
        std::vector<Rational> v(nm * t.jq);
        for (std::size_t k = 0; k < t.jq; ++k) v[mask * t.jq + k] = b[k];
        span.append_row(v);
      }
    t.c.push_back(nm * t.rq - delta_g);
    t.ce.push_back(nm * t.jq - delta_full);
    t.f.push_back(nm * t.jq - rank(span));
  }
  return t;
}

std::vector<JetSection> spencer_operator(const JetSection& xi, const DiffContext& ctx) {
  if (xi.q() == 0) throw PreconditionError("Spencer operator needs a section of order at least 1");
  std::vector<JetSection> out;
  for (unsigned i = 1; i <= xi.n(); ++i) {
    JetSection s(xi.n(), xi.m(), xi.q() - 1);
    for (unsigned k = 0; k < xi.m(); ++k)
      for (const auto& mu : multi_indices_up_to(xi.n(), xi.q() - 1))
        s.set(k, mu, ctx.derive(xi.value(k, mu), i) - xi.value(k, mu.plus(i)));
    out.push_back(std::move(s));
  }
  return out;
}

FirstSpencer first_spencer_operator(const JetSystem& r, std::uint64_t seed) {
  if (symbol(r, 1, seed).dim() != 0) throw PreconditionError("first Spencer operator needs g_{q+1} = 0");
  Echelon ech;
  for (const auto& e : r.equations()) ech.add(e);
  std::vector<std::pair<JetEquation, unsigned>> level, next;
  for (const auto& e : r.equations()) level.emplace_back(e, 1);
  for (auto& e : next_level(level, r.ctx(), next)) {
    auto added = ech.add(std::move(e));
    if (added && added->pivot.mu.order() <= r.q())
      throw PreconditionError("system is not formally integrable: new equation " +
                              r.to_string(clear_denominators(added->reduced)));
  }
  JetSystem r1 = prolong(r, 1);
  SolvedForm sf = solve_system(r1);

  FirstSpencer out;
  out.parametric = sf.parametric;
  std::size_t np = sf.parametric.size();
  unsigned n = r.n();
  out.op = OperatorMatrix(r.context(), np * n, np);
  for (std::size_t p = 0; p < np; ++p) {
    out.op.col_labels()[p] = r.coordinate_name(sf.parametric[p]);
    for (unsigned i = 1; i <= n; ++i) {
      std::size_t row = p * n + (i - 1);
      out.op.row_labels()[row] = "d" + std::to_string(i) + "." + r.coordinate_name(sf.parametric[p]);
      out.op.at(row, p) += ScalarOperator::d(MultiIndex::unit(i));
      JetCoord up{sf.parametric[p].col, sf.parametric[p].mu.plus(i)};
      auto v = sf.express(up);
      for (std::size_t c = 0; c < np; ++c)
        if (!v[c].is_zero()) out.op.at(row, c) -= ScalarOperator(v[c]);
    }
  }
  return out;
}

}  // namespace dmod
