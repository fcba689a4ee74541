#include "dmod/operator.hpp"

#include <algorithm>
#include <unordered_map>

#include "dmod/errors.hpp"

namespace dmod {

namespace {

bool term_before(const MultiIndex& a, const MultiIndex& b) { return grevlex_compare(a, b) > 0; }

struct SignedText {
  bool negative;
  std::string body;
};

std::vector<SignedText> render_terms(const ScalarOperator& p, const std::string& operand) {
  std::vector<SignedText> out;
  for (const auto& [mu, a] : p.terms()) {
    std::string head = mu.order() == 0 ? operand : "d[" + mu.index_list() + "](" + operand + ")";
    if (a.is_constant()) {
      Rational c = a.constant();
      bool neg = c < 0;
      if (neg) c = -c;
      out.push_back({neg, c == 1 ? head : to_string(c) + "*" + head});
    } else {
      Scalar s = a;
      bool neg = false;
      Polynomial num = a.numerator();
      if (num.leading_coefficient() < 0) {
        neg = true;
        s = -a;
      }
      std::string text = s.to_string();
      bool simple = s.numerator().is_monomial() && s.denominator().is_constant();
      out.push_back({neg, (simple ? text : "(" + text + ")") + "*" + head});
    }
  }
  return out;
}

std::string join(const std::vector<SignedText>& terms) {
  if (terms.empty()) return "0";
  std::string s;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i == 0) {
      if (terms[i].negative) s += "-";
    } else {
      s += terms[i].negative ? " - " : " + ";
    }
    s += terms[i].body;
  }
  return s;
}

}  // namespace

ScalarOperator ScalarOperator::d(const MultiIndex& mu, const Scalar& a) {
  ScalarOperator p;
  p.add_term(mu, a);
  return p;
}

ScalarOperator ScalarOperator::d(std::initializer_list<unsigned> idx, const Scalar& a) {
  return d(MultiIndex::from_list(std::vector<unsigned>(idx)), a);
}

Scalar ScalarOperator::coefficient(const MultiIndex& mu) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), mu,
                             [](const Term& t, const MultiIndex& m) { return term_before(t.first, m); });
  if (it != terms_.end() && it->first == mu) return it->second;
  return Scalar();
}

void ScalarOperator::add_term(const MultiIndex& mu, const Scalar& a) {
  if (a.is_zero()) return;
  auto it = std::lower_bound(terms_.begin(), terms_.end(), mu,
                             [](const Term& t, const MultiIndex& m) { return term_before(t.first, m); });
  if (it != terms_.end() && it->first == mu) {
    it->second += a;
    if (it->second.is_zero()) terms_.erase(it);
  } else {
    terms_.insert(it, {mu, a});
  }
}

ScalarOperator ScalarOperator::operator-() const {
  ScalarOperator r = *this;
  for (auto& t : r.terms_) t.second = -t.second;
  return r;
}

ScalarOperator& ScalarOperator::operator+=(const ScalarOperator& o) {
  std::vector<Term> out;
  out.reserve(terms_.size() + o.terms_.size());
  auto i = terms_.begin();
  auto j = o.terms_.begin();
  while (i != terms_.end() && j != o.terms_.end()) {
    int c = grevlex_compare(i->first, j->first);
    if (c > 0) {
      out.push_back(*i++);
    } else if (c < 0) {
      out.push_back(*j++);
    } else {
      Scalar s = i->second + j->second;
      if (!s.is_zero()) out.push_back({i->first, s});
      ++i;
      ++j;
    }
  }
  out.insert(out.end(), i, terms_.end());
  out.insert(out.end(), j, o.terms_.end());
  terms_ = std::move(out);
  return *this;
}

ScalarOperator& ScalarOperator::operator-=(const ScalarOperator& o) { return *this += -o; }

ScalarOperator ScalarOperator::scaled(const Scalar& a) const {
  if (a.is_zero()) return {};
  ScalarOperator r = *this;
  for (auto& t : r.terms_) t.second = a * t.second;
  return r;
}

std::string ScalarOperator::to_string(const std::string& operand, const DiffContext*) const {
  return join(render_terms(*this, operand));
}

namespace {

// Memoized d^kappa a, each built from a lower one by a single derivation.
class Derivatives {
 public:
  Derivatives(const Scalar& a, const DiffContext& ctx) : ctx_(&ctx) { cache_.emplace(MultiIndex{}, a); }
  const Scalar& get(const MultiIndex& kappa) {
    auto it = cache_.find(kappa);
    if (it != cache_.end()) return it->second;
    unsigned i = 1;
    while (kappa.c[i - 1] == 0) ++i;
    Scalar d = ctx_->derive(get(kappa - MultiIndex::unit(i)), i);
    return cache_.emplace(kappa, std::move(d)).first->second;
  }

 private:
  const DiffContext* ctx_;
  std::map<MultiIndex, Scalar> cache_;
};

}  // namespace

ScalarOperator compose(const ScalarOperator& p, const ScalarOperator& q, const DiffContext& ctx) {
  ScalarOperator out;
  if (p.is_zero() || q.is_zero()) return out;
  // d_mu ∘ b = sum_{kappa <= mu} C(mu, kappa) (d^kappa b) d_{mu - kappa}
  std::vector<Derivatives> cache;
  for (const auto& t : q.terms()) cache.emplace_back(t.second, ctx);
  auto deriv = [&](std::size_t qi, const MultiIndex& kappa) -> const Scalar& { return cache[qi].get(kappa); };
  std::map<MultiIndex, Scalar> acc;
  for (const auto& [mu, a] : p.terms()) {
    for (std::size_t qi = 0; qi < q.terms().size(); ++qi) {
      const auto& nu = q.terms()[qi].first;
      const Scalar& b = q.terms()[qi].second;
      if (b.is_constant()) {
        acc[mu + nu] += a * b;
        continue;
      }
      for (const auto& kappa : sub_indices(mu)) {
        const Scalar& db = deriv(qi, kappa);
        if (db.is_zero()) continue;
        acc[mu - kappa + nu] += a * Scalar(binomial(mu, kappa)) * db;
      }
    }
  }
  for (auto& [mu, c] : acc) out.add_term(mu, c);
  return out;
}

ScalarOperator adjoint(const ScalarOperator& p, const DiffContext& ctx) {
  std::map<MultiIndex, Scalar> acc;
  for (const auto& [mu, a] : p.terms()) {
    Scalar sign(mu.order() % 2 == 0 ? 1 : -1);
    if (a.is_constant()) {
      acc[mu] += sign * a;
      continue;
    }
    Derivatives da(a, ctx);
    for (const auto& kappa : sub_indices(mu)) {
      const Scalar& d = da.get(kappa);
      if (d.is_zero()) continue;
      acc[mu - kappa] += sign * Scalar(binomial(mu, kappa)) * d;
    }
  }
  ScalarOperator out;
  for (auto& [mu, c] : acc) out.add_term(mu, c);
  return out;
}

OperatorMatrix::OperatorMatrix(ContextPtr ctx, std::size_t rows, std::size_t cols)
    : ctx_(std::move(ctx)), rows_(rows), cols_(cols), e_(rows * cols), row_labels_(rows), col_labels_(cols) {}

std::vector<ScalarOperator> OperatorMatrix::row(std::size_t r) const {
  return {e_.begin() + static_cast<std::ptrdiff_t>(r * cols_), e_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)};
}

void OperatorMatrix::append_row(const std::vector<ScalarOperator>& row, std::string label) {
  if (row.size() != cols_) throw PreconditionError("row length does not match column count");
  e_.insert(e_.end(), row.begin(), row.end());
  row_labels_.push_back(std::move(label));
  ++rows_;
}

OperatorMatrix OperatorMatrix::select_rows(const std::vector<std::size_t>& which) const {
  OperatorMatrix out(ctx_, 0, cols_);
  out.col_labels_ = col_labels_;
  for (auto r : which) out.append_row(row(r), row_labels_[r]);
  return out;
}

int OperatorMatrix::order() const {
  int q = -1;
  for (const auto& e : e_) q = std::max(q, e.order());
  return q;
}

bool OperatorMatrix::is_zero() const {
  return std::all_of(e_.begin(), e_.end(), [](const ScalarOperator& p) { return p.is_zero(); });
}

std::string OperatorMatrix::row_label(std::size_t r) const {
  if (r < row_labels_.size() && !row_labels_[r].empty()) return row_labels_[r];
  return "e" + std::to_string(r + 1);
}

std::string OperatorMatrix::col_label(std::size_t c) const {
  if (c < col_labels_.size() && !col_labels_[c].empty()) return col_labels_[c];
  return "y" + std::to_string(c + 1);
}

bool OperatorMatrix::operator==(const OperatorMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
}

std::vector<std::string> OperatorMatrix::equations() const {
  std::vector<std::string> out;
  for (std::size_t r = 0; r < rows_; ++r) {
    std::vector<SignedText> terms;
    for (std::size_t c = 0; c < cols_; ++c) {
      auto t = render_terms(at(r, c), col_label(c));
      terms.insert(terms.end(), t.begin(), t.end());
    }
    out.push_back(join(terms));
  }
  return out;
}

OperatorMatrix compose(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.cols() != b.rows()) throw PreconditionError("operator shapes do not compose");
  OperatorMatrix out(a.context(), a.rows(), b.cols());
  out.row_labels() = a.row_labels();
  out.col_labels() = b.col_labels();
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < b.cols(); ++k) {
      ScalarOperator s;
      for (std::size_t j = 0; j < a.cols(); ++j) {
        if (a.at(i, j).is_zero() || b.at(j, k).is_zero()) continue;
        s += compose(a.at(i, j), b.at(j, k), a.ctx());
      }
      out.at(i, k) = std::move(s);
    }
  return out;
}

OperatorMatrix formal_adjoint(const OperatorMatrix& d) {
  OperatorMatrix out(d.context(), d.cols(), d.rows());
  for (std::size_t r = 0; r < d.rows(); ++r) out.col_labels()[r] = "lambda" + std::to_string(r + 1);
  for (std::size_t c = 0; c < d.cols(); ++c) out.row_labels()[c] = "nu" + std::to_string(c + 1);
  for (std::size_t r = 0; r < d.rows(); ++r)
    for (std::size_t c = 0; c < d.cols(); ++c) out.at(c, r) = adjoint(d.at(r, c), d.ctx());
  return out;
}

std::vector<ScalarOperator> row_times(const std::vector<ScalarOperator>& row, const OperatorMatrix& d) {
  std::vector<ScalarOperator> out(d.cols());
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j].is_zero()) continue;
    for (std::size_t c = 0; c < d.cols(); ++c) {
      if (d.at(j, c).is_zero()) continue;
      out[c] += compose(row[j], d.at(j, c), d.ctx());
    }
  }
  return out;
}

JetSection JetSection::prolongation_of(const std::vector<Scalar>& f, unsigned q, const DiffContext& ctx) {
  JetSection s(ctx.n(), static_cast<unsigned>(f.size()), q);
  for (unsigned k = 0; k < f.size(); ++k)
    for (const auto& mu : multi_indices_up_to(ctx.n(), q)) s.set(k, mu, ctx.derive_multi(f[k], mu.c));
  return s;
}

Scalar JetSection::value(unsigned k, const MultiIndex& mu) const {
  if (mu.order() > q_) throw PreconditionError("jet section order too low");
  auto it = values_.find({k, mu});
  return it == values_.end() ? Scalar() : it->second;
}

void JetSection::set(unsigned k, const MultiIndex& mu, const Scalar& v) {
  if (mu.order() > q_) throw PreconditionError("jet beyond section order");
  if (v.is_zero()) {
    values_.erase({k, mu});
  } else {
    values_[{k, mu}] = v;
  }
}

std::vector<Scalar> op_apply(const OperatorMatrix& d, const JetSection& xi) {
  if (d.order() > static_cast<int>(xi.q())) throw PreconditionError("section order lower than operator order");
  std::vector<Scalar> out(d.rows());
  for (std::size_t r = 0; r < d.rows(); ++r)
    for (std::size_t c = 0; c < d.cols(); ++c)
      for (const auto& [mu, a] : d.at(r, c).terms()) out[r] += a * xi.value(static_cast<unsigned>(c), mu);
  return out;
}

std::vector<Scalar> op_apply(const OperatorMatrix& d, const std::vector<Scalar>& f) {
  if (f.size() != d.cols()) throw PreconditionError("section has wrong number of components");
  std::vector<Scalar> out(d.rows());
  for (std::size_t r = 0; r < d.rows(); ++r)
    for (std::size_t c = 0; c < d.cols(); ++c)
      for (const auto& [mu, a] : d.at(r, c).terms()) out[r] += a * d.ctx().derive_multi(f[c], mu.c);
  return out;
}

Bilinear canonical(Bilinear b) {
  std::map<std::pair<MultiIndex, MultiIndex>, Scalar> acc;
  for (auto& t : b) acc[{t.lam, t.xi}] += t.c;
  Bilinear out;
  for (auto& [k, c] : acc)
    if (!c.is_zero()) out.push_back({c, k.first, k.second});
  return out;
}

Bilinear total_derivative(const Bilinear& b, unsigned i, const DiffContext& ctx) {
  Bilinear out;
  for (const auto& t : b) {
    Scalar dc = ctx.derive(t.c, i);
    if (!dc.is_zero()) out.push_back({dc, t.lam, t.xi});
    out.push_back({t.c, t.lam.plus(i), t.xi});
    out.push_back({t.c, t.lam, t.xi.plus(i)});
  }
  return canonical(std::move(out));
}

std::vector<Bilinear> green_divergence(const ScalarOperator& p, const DiffContext& ctx) {
  std::vector<Bilinear> b(ctx.n());
  // Work list holding lambda * a * xi_mu; integrate by parts one derivative at a time.
  Bilinear work;
  for (const auto& [mu, a] : p.terms()) work.push_back({a, MultiIndex{}, mu});
  while (true) {
    auto it = std::find_if(work.begin(), work.end(), [](const BilinearTerm& t) { return t.xi.order() > 0; });
    if (it == work.end()) break;
    BilinearTerm t = *it;
    work.erase(it);
    unsigned i = t.xi.cls();
    MultiIndex lower = t.xi - MultiIndex::unit(i);
    // c l_a x_{b} = d_i(c l_a x_{b-1_i}) - (d_i c) l_a x_{b-1_i} - c l_{a+1_i} x_{b-1_i}
    b[i - 1].push_back({t.c, t.lam, lower});
    Scalar dc = ctx.derive(t.c, i);
    if (!dc.is_zero()) work.push_back({-dc, t.lam, lower});
    work.push_back({-t.c, t.lam.plus(i), lower});
  }
  for (auto& bi : b) bi = canonical(std::move(bi));
  return b;
}

}  // namespace dmod
