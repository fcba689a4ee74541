#include "dmod/involutive.hpp"

#include <algorithm>
#include <functional>

#include "dmod/errors.hpp"

namespace dmod {

std::uint64_t TermOrder::key(unsigned col, const MultiIndex& mu) const {
  std::uint64_t k = static_cast<std::uint64_t>(block[col] & 0xF) << 60;
  k |= static_cast<std::uint64_t>(std::min(mu.order(), 255u)) << 52;
  unsigned shift = 44;
  for (unsigned j = n; j >= 2; --j) {
    k |= static_cast<std::uint64_t>(255 - mu.c[j - 1]) << shift;
    shift -= 8;
  }
  k |= static_cast<std::uint64_t>(4095 - col) & 0xFFF;
  return k;
}

bool InvolutiveBasis::NormalForm::is_zero() const {
  return std::all_of(remainder.begin(), remainder.end(), [](const ScalarOperator& p) { return p.is_zero(); });
}

InvolutiveBasis::InvolutiveBasis(ContextPtr ctx, std::size_t m, TermOrder order, CompletionOptions opts)
    : ctx_(std::move(ctx)), m_(m), order_(std::move(order)), opts_(opts) {
  if (ctx_->n() > kMaxVars) throw PreconditionError("too many independent variables");
  if (m_ > 4000) throw PreconditionError("too many unknowns");
  if (order_.block.size() != m_) throw PreconditionError("term order does not match column count");
}

InvolutiveBasis InvolutiveBasis::of(const OperatorMatrix& d, CompletionOptions opts) {
  InvolutiveBasis b(d.context(), d.cols(), TermOrder::single_block(d.n(), d.cols()), opts);
  for (std::size_t r = 0; r < d.rows(); ++r) b.add(d.row(r));
  b.complete();
  return b;
}

InvolutiveBasis::Sparse InvolutiveBasis::to_sparse(const Row& row) const {
  Sparse s;
  for (std::size_t c = 0; c < row.size(); ++c)
    for (const auto& [mu, a] : row[c].terms()) s.push_back({make_term(static_cast<unsigned>(c), mu), a});
  std::sort(s.begin(), s.end(), [](const Entry& a, const Entry& b) { return a.first.key > b.first.key; });
  return s;
}

Row InvolutiveBasis::to_row(const Sparse& s) const {
  Row row(m_);
  for (const auto& [t, a] : s) row[t.col].add_term(t.mu, a);
  return row;
}

void InvolutiveBasis::add(const Row& row) {
  if (row.size() != m_) throw PreconditionError("row length does not match column count");
  Sparse s = to_sparse(row);
  if (s.empty()) return;
  int q = 0;
  for (const auto& e : s) q = std::max(q, static_cast<int>(e.first.mu.order()));
  int cap = opts_.order_cap >= 0 ? opts_.order_cap : 3 * q + 6;
  cap_ = std::max(cap_, cap);
  pending_.push_back(std::move(s));
}

InvolutiveBasis::Sparse InvolutiveBasis::derive_once(const Sparse& s, unsigned i) const {
  std::map<std::uint64_t, Entry, std::greater<>> acc;
  for (const auto& [t, a] : s) {
    Term up = make_term(t.col, t.mu.plus(i));
    auto [it, fresh] = acc.try_emplace(up.key, up, a);
    if (!fresh) it->second.second += a;
    if (!a.is_constant()) {
      Scalar da = ctx_->derive(a, i);
      if (!da.is_zero()) {
        auto [jt, fresh2] = acc.try_emplace(t.key, t, da);
        if (!fresh2) jt->second.second += da;
      }
    }
  }
  Sparse out;
  out.reserve(acc.size());
  for (auto& [k, e] : acc)
    if (!e.second.is_zero()) out.push_back(std::move(e));
  return out;
}

const InvolutiveBasis::Sparse& InvolutiveBasis::shifted(std::size_t e, const MultiIndex& nu) const {
  const Elem& el = elems_[e];
  if (nu.order() == 0) return el.poly;
  auto& memo = *el.shifts;
  auto it = memo.find(nu);
  if (it != memo.end()) return it->second;
  unsigned i = nu.last();
  const Sparse& prev = shifted(e, nu - MultiIndex::unit(i));
  Sparse next = derive_once(prev, i);
  return memo.emplace(nu, std::move(next)).first->second;
}

std::optional<std::size_t> InvolutiveBasis::divisor(const Term& t) const {
  for (std::size_t e = 0; e < elems_.size(); ++e) {
    const Term& lt = elems_[e].poly.front().first;
    if (lt.col != t.col || !lt.mu.divides(t.mu)) continue;
    bool ok = true;
    for (unsigned i = 1; i <= ctx_->n() && ok; ++i)
      if (t.mu[i] > lt.mu[i] && !(elems_[e].mult & (1u << (i - 1)))) ok = false;
    if (ok) return e;
  }
  return std::nullopt;
}

InvolutiveBasis::Sparse InvolutiveBasis::reduce(Sparse f, std::map<std::size_t, ScalarOperator>* cof) const {
  std::map<std::uint64_t, Entry, std::greater<>> acc;
  for (auto& e : f) acc.emplace(e.first.key, std::move(e));
  Sparse rem;
  while (!acc.empty()) {
    auto it = acc.begin();
    Entry cur = std::move(it->second);
    acc.erase(it);
    auto g = divisor(cur.first);
    if (!g) {
      rem.push_back(std::move(cur));
      continue;
    }
    MultiIndex nu = cur.first.mu - elems_[*g].poly.front().first.mu;
    const Sparse& s = shifted(*g, nu);
    const Scalar& c = cur.second;
    if (cof) (*cof)[*g].add_term(nu, c);
    for (std::size_t k = 1; k < s.size(); ++k) {
      Scalar v = c * s[k].second;
      auto [jt, fresh] = acc.try_emplace(s[k].first.key, s[k].first, -v);
      if (!fresh) {
        jt->second.second -= v;
        if (jt->second.second.is_zero()) acc.erase(jt);
      }
    }
  }
  return rem;
}

void InvolutiveBasis::assign_multiplicative() {
  unsigned n = ctx_->n();
  for (auto& e : elems_) {
    const Term& u = e.poly.front().first;
    std::uint8_t mult = 0;
    for (unsigned i = 1; i <= n; ++i) {
      unsigned best = 0;
      for (const auto& o : elems_) {
        const Term& v = o.poly.front().first;
        if (v.col != u.col) continue;
        bool same_tail = true;
        for (unsigned j = i + 1; j <= n && same_tail; ++j) same_tail = v.mu[j] == u.mu[j];
        if (same_tail) best = std::max(best, v.mu[i]);
      }
      if (u.mu[i] == best) mult |= static_cast<std::uint8_t>(1u << (i - 1));
    }
    e.mult = mult;
  }
}

void InvolutiveBasis::insert(Sparse h, std::vector<Sparse>& queue) {
  const Term& lt = h.front().first;
  for (std::size_t e = 0; e < elems_.size();) {
    const Term& g = elems_[e].poly.front().first;
    if (g.col == lt.col && lt.mu.divides(g.mu) && !(g.mu == lt.mu)) {
      queue.push_back(std::move(elems_[e].poly));
      elems_.erase(elems_.begin() + static_cast<std::ptrdiff_t>(e));
    } else {
      ++e;
    }
  }
  Elem el;
  el.poly = std::move(h);
  el.shifts = std::make_shared<std::map<MultiIndex, Sparse>>();
  elems_.push_back(std::move(el));
  assign_multiplicative();
}

void InvolutiveBasis::complete() {
  std::vector<Sparse> queue = std::move(pending_);
  pending_.clear();
  unsigned n = ctx_->n();
  auto discarded = [&](const Sparse& h) {
    return opts_.discard_lower_block && order_.block[h.front().first.col] == 0;
  };
  while (true) {
    while (!queue.empty()) {
      auto pick = std::min_element(queue.begin(), queue.end(), [](const Sparse& a, const Sparse& b) {
        if (a.empty() || b.empty()) return a.empty() && !b.empty();
        return a.front().first.key < b.front().first.key;
      });
      Sparse f = std::move(*pick);
      queue.erase(pick);
      if (f.empty()) continue;
      Sparse h = reduce(std::move(f), nullptr);
      if (h.empty() || discarded(h)) continue;
      Scalar inv = h.front().second.inverse();
      if (!inv.is_one())
        for (auto& e : h) e.second = e.second * inv;
      if (static_cast<int>(h.front().first.mu.order()) > cap_)
        throw CapExceeded("involutive completion exceeded the prolongation order cap " + std::to_string(cap_));
      insert(std::move(h), queue);
    }
    // Next non-multiplicative prolongation, lowest leading term first.
    std::optional<std::pair<std::size_t, unsigned>> best;
    std::uint64_t best_key = 0;
    for (std::size_t e = 0; e < elems_.size(); ++e) {
      const Term& lt = elems_[e].poly.front().first;
      for (unsigned i = 1; i <= n; ++i) {
        std::uint8_t bit = static_cast<std::uint8_t>(1u << (i - 1));
        if ((elems_[e].mult & bit) || (elems_[e].prolonged & bit)) continue;
        std::uint64_t k = order_.key(lt.col, lt.mu.plus(i));
        if (!best || k < best_key) {
          best = {e, i};
          best_key = k;
        }
      }
    }
    if (best) {
      elems_[best->first].prolonged |= static_cast<std::uint8_t>(1u << (best->second - 1));
      queue.push_back(shifted(best->first, MultiIndex::unit(best->second)));
      continue;
    }
    // Certificate pass: every non-multiplicative prolongation must reduce to zero.
    certified_ = 0;
    for (std::size_t e = 0; e < elems_.size(); ++e)
      for (unsigned i = 1; i <= n; ++i) {
        if (elems_[e].mult & (1u << (i - 1))) continue;
        Sparse r = reduce(shifted(e, MultiIndex::unit(i)), nullptr);
        ++certified_;
        if (!r.empty() && !discarded(r)) queue.push_back(std::move(r));
      }
    if (queue.empty()) break;
  }
}

Row InvolutiveBasis::generator(std::size_t i) const { return to_row(elems_.at(i).poly); }

OperatorMatrix InvolutiveBasis::generators() const {
  OperatorMatrix out(ctx_, 0, m_);
  for (std::size_t i = 0; i < elems_.size(); ++i) out.append_row(generator(i));
  return out;
}

std::pair<unsigned, MultiIndex> InvolutiveBasis::leading(std::size_t i) const {
  const Term& t = elems_.at(i).poly.front().first;
  return {t.col, t.mu};
}

std::vector<unsigned> InvolutiveBasis::multiplicative(std::size_t i) const {
  std::vector<unsigned> out;
  for (unsigned k = 1; k <= ctx_->n(); ++k)
    if (elems_.at(i).mult & (1u << (k - 1))) out.push_back(k);
  return out;
}

int InvolutiveBasis::order() const {
  int q = -1;
  for (const auto& e : elems_)
    for (const auto& t : e.poly) q = std::max(q, static_cast<int>(t.first.mu.order()));
  return q;
}

InvolutiveBasis::NormalForm InvolutiveBasis::normal_form(const Row& f, bool with_cofactors) const {
  if (!pending_.empty()) throw PreconditionError("normal form requested before completion");
  NormalForm out;
  Sparse r = reduce(to_sparse(f), with_cofactors ? &out.cofactors : nullptr);
  out.remainder = to_row(r);
  return out;
}

bool InvolutiveBasis::reduces_to_zero(const Row& f) const {
  if (!pending_.empty()) throw PreconditionError("normal form requested before completion");
  return reduce(to_sparse(f), nullptr).empty();
}

Membership row_module_membership(const Row& f, const OperatorMatrix& d, CompletionOptions opts) {
  std::size_t m = d.cols(), p = d.rows();
  if (f.size() != m) throw PreconditionError("row length does not match column count");
  Membership out;
  if (p == 0) {
    out.member = std::all_of(f.begin(), f.end(), [](const ScalarOperator& x) { return x.is_zero(); });
    return out;
  }
  TermOrder order{d.n(), std::vector<std::uint8_t>(m + p, 0)};
  for (std::size_t c = 0; c < m; ++c) order.block[c] = 1;
  opts.discard_lower_block = true;
  InvolutiveBasis b(d.context(), m + p, order, opts);
  for (std::size_t r = 0; r < p; ++r) {
    Row row = d.row(r);
    row.resize(m + p);
    row[m + r] = ScalarOperator(1);
    b.add(row);
  }
  b.complete();
  Row g = f;
  g.resize(m + p);
  auto nf = b.normal_form(g);
  bool active_zero = true;
  for (std::size_t c = 0; c < m; ++c) active_zero = active_zero && nf.remainder[c].is_zero();
  out.member = active_zero;
  if (active_zero) {
    out.cofactors.assign(p, ScalarOperator());
    for (std::size_t r = 0; r < p; ++r) out.cofactors[r] = -nf.remainder[m + r];
  }
  return out;
}

ModuleComparison row_module_equal(const OperatorMatrix& a, const OperatorMatrix& b, CompletionOptions opts) {
  if (a.cols() != b.cols()) throw PreconditionError("row modules live in free modules of different rank");
  ModuleComparison out;
  auto check = [&](const OperatorMatrix& base, const OperatorMatrix& rows) -> std::optional<Row> {
    if (rows.rows() == 0) return std::nullopt;
    if (base.rows() == 0) {
      for (std::size_t r = 0; r < rows.rows(); ++r) {
        Row row = rows.row(r);
        if (!std::all_of(row.begin(), row.end(), [](const ScalarOperator& x) { return x.is_zero(); })) return row;
      }
      return std::nullopt;
    }
    InvolutiveBasis basis = InvolutiveBasis::of(base, opts);
    for (std::size_t r = 0; r < rows.rows(); ++r) {
      Row row = rows.row(r);
      if (!basis.reduces_to_zero(row)) return row;
    }
    return std::nullopt;
  };
  if (auto w = check(a, b)) {
    out.witness = std::move(w);
    out.witness_from_second = true;
    return out;
  }
  if (auto w = check(b, a)) {
    out.witness = std::move(w);
    return out;
  }
  out.equal = true;
  return out;
}

OperatorMatrix prune_generators(const OperatorMatrix& d, CompletionOptions opts) {
  TermOrder order = TermOrder::single_block(d.n(), d.cols());
  InvolutiveBasis probe(d.context(), d.cols(), order, opts);
  std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    auto s = probe.to_sparse(d.row(r));
    if (s.empty()) continue;
    keyed.push_back({s.front().first.key, r});
  }
  std::stable_sort(keyed.begin(), keyed.end());
  InvolutiveBasis basis(d.context(), d.cols(), order, opts);
  std::vector<std::size_t> kept;
  for (const auto& [key, r] : keyed) {
    if (basis.size() > 0 && basis.reduces_to_zero(d.row(r))) continue;
    basis.add(d.row(r));
    basis.complete();
    kept.push_back(r);
  }
  return d.select_rows(kept);
}

OperatorMatrix compatibility_conditions(const OperatorMatrix& d, CompletionOptions opts) {
  std::size_t p = d.rows(), m = d.cols();
  OperatorMatrix out(d.context(), 0, p);
  for (std::size_t r = 0; r < p; ++r) out.col_labels()[r] = d.row_label(r);
  if (p == 0) return out;
  bool all_zero = d.is_zero();
  if (m == 0 || all_zero) {
    for (std::size_t r = 0; r < p; ++r) {
      Row row(p);
      row[r] = ScalarOperator(1);
      out.append_row(row, "C" + std::to_string(r + 1));
    }
    return out;
  }
  TermOrder order{d.n(), std::vector<std::uint8_t>(m + p, 0)};
  for (std::size_t c = 0; c < m; ++c) order.block[c] = 1;
  InvolutiveBasis b(d.context(), m + p, order, opts);
  for (std::size_t r = 0; r < p; ++r) {
    Row row = d.row(r);
    row.resize(m + p);
    row[m + r] = ScalarOperator(-1);
    b.add(row);
  }
  b.complete();
  // Elements living purely in the eta block are the compatibility conditions;
  // keep those whose leading term is minimal among them.
  std::vector<std::size_t> cc;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b.leading(i).first >= m) cc.push_back(i);
  OperatorMatrix raw(d.context(), 0, p);
  raw.col_labels() = out.col_labels();
  for (auto i : cc) {
    auto [ci, mi] = b.leading(i);
    bool redundant = false;
    for (auto j : cc) {
      if (j == i) continue;
      auto [cj, mj] = b.leading(j);
      if (cj == ci && mj.divides(mi) && !(mj == mi)) redundant = true;
    }
    if (redundant) continue;
    Row g = b.generator(i);
    Row row(g.begin() + static_cast<std::ptrdiff_t>(m), g.end());
    for (auto& x : row) x = -x;
    raw.append_row(row);
  }
  OperatorMatrix pruned = prune_generators(raw, opts);
  for (std::size_t r = 0; r < pruned.rows(); ++r) out.append_row(pruned.row(r), "C" + std::to_string(r + 1));
  return out;
}

Resolution free_resolution(const OperatorMatrix& d, unsigned max_length, CompletionOptions opts) {
  if (max_length < 1) throw PreconditionError("resolution length must be at least 1");
  Resolution res;
  res.maps.push_back(d);
  for (unsigned k = 0; k < max_length; ++k) {
    OperatorMatrix cc = compatibility_conditions(res.maps.back(), opts);
    if (cc.rows() == 0) {
      res.exact_end = true;
      break;
    }
    res.maps.push_back(std::move(cc));
  }
  return res;
}

}  // namespace dmod
