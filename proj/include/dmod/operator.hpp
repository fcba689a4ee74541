#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dmod/multi_index.hpp"
#include "dmod/scalar.hpp"

namespace dmod {

using ContextPtr = std::shared_ptr<const DiffContext>;

// P = sum a^mu d_mu with coefficients on the left. Terms are kept in
// descending grevlex order of mu with no zero coefficients.
class ScalarOperator {
 public:
  using Term = std::pair<MultiIndex, Scalar>;

  ScalarOperator() = default;
  ScalarOperator(const Scalar& a) { add_term(MultiIndex{}, a); }  // NOLINT(implicit)
  ScalarOperator(long a) : ScalarOperator(Scalar(a)) {}           // NOLINT(implicit)
  static ScalarOperator d(const MultiIndex& mu, const Scalar& a = Scalar(1));
  static ScalarOperator d(std::initializer_list<unsigned> idx, const Scalar& a = Scalar(1));

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  // -1 for the zero operator.
  int order() const { return terms_.empty() ? -1 : static_cast<int>(terms_.front().first.order()); }
  Scalar coefficient(const MultiIndex& mu) const;
  void add_term(const MultiIndex& mu, const Scalar& a);

  ScalarOperator operator-() const;
  ScalarOperator& operator+=(const ScalarOperator& o);
  ScalarOperator& operator-=(const ScalarOperator& o);
  friend ScalarOperator operator+(ScalarOperator a, const ScalarOperator& b) { return a += b; }
  friend ScalarOperator operator-(ScalarOperator a, const ScalarOperator& b) { return a -= b; }
  // Left multiplication by a scalar: (a P) = sum (a a^mu) d_mu.
  ScalarOperator scaled(const Scalar& a) const;
  bool operator==(const ScalarOperator& o) const { return terms_ == o.terms_; }

  // Rendering against an operand name, e.g. "d[1,2](u) - u".
  std::string to_string(const std::string& operand, const DiffContext* ctx = nullptr) const;

 private:
  std::vector<Term> terms_;
};

// A row of an operator matrix: one entry per unknown.
using Row = std::vector<ScalarOperator>;

ScalarOperator compose(const ScalarOperator& p, const ScalarOperator& q, const DiffContext& ctx);
ScalarOperator adjoint(const ScalarOperator& p, const DiffContext& ctx);

// A p x m matrix over D acting on column vectors of m unknowns.
class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  OperatorMatrix(ContextPtr ctx, std::size_t rows, std::size_t cols);

  const ContextPtr& context() const { return ctx_; }
  const DiffContext& ctx() const { return *ctx_; }
  unsigned n() const { return ctx_->n(); }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  ScalarOperator& at(std::size_t r, std::size_t c) { return e_[r * cols_ + c]; }
  const ScalarOperator& at(std::size_t r, std::size_t c) const { return e_[r * cols_ + c]; }
  std::vector<ScalarOperator> row(std::size_t r) const;
  void append_row(const std::vector<ScalarOperator>& row, std::string label = {});
  OperatorMatrix select_rows(const std::vector<std::size_t>& which) const;
  int order() const;
  bool is_zero() const;

  std::vector<std::string>& row_labels() { return row_labels_; }
  const std::vector<std::string>& row_labels() const { return row_labels_; }
  std::vector<std::string>& col_labels() { return col_labels_; }
  const std::vector<std::string>& col_labels() const { return col_labels_; }
  std::string row_label(std::size_t r) const;
  std::string col_label(std::size_t c) const;

  bool operator==(const OperatorMatrix& o) const;
  // One line per row: "<label> = sum of entries applied to unknowns".
  std::vector<std::string> equations() const;

 private:
  ContextPtr ctx_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<ScalarOperator> e_;
  std::vector<std::string> row_labels_;
  std::vector<std::string> col_labels_;
};

// A∘B for A (p x m) and B (m x k).
OperatorMatrix compose(const OperatorMatrix& a, const OperatorMatrix& b);
// Transpose with entrywise adjoint; shape m x p.
OperatorMatrix formal_adjoint(const OperatorMatrix& d);
// Row vector times matrix: (sum_j row_j ∘ D_{j,c})_c.
std::vector<ScalarOperator> row_times(const std::vector<ScalarOperator>& row, const OperatorMatrix& d);

// Formal jet values xi^k_mu for k < m, |mu| <= q.
class JetSection {
 public:
  JetSection(unsigned n, unsigned m, unsigned q) : n_(n), m_(m), q_(q) {}
  // j_q of explicit component functions.
  static JetSection prolongation_of(const std::vector<Scalar>& f, unsigned q, const DiffContext& ctx);

  unsigned n() const { return n_; }
  unsigned m() const { return m_; }
  unsigned q() const { return q_; }
  Scalar value(unsigned k, const MultiIndex& mu) const;
  void set(unsigned k, const MultiIndex& mu, const Scalar& v);

 private:
  unsigned n_, m_, q_;
  std::map<std::pair<unsigned, MultiIndex>, Scalar> values_;
};

// Evaluates D on a jet section; throws PreconditionError when the section order is too low.
std::vector<Scalar> op_apply(const OperatorMatrix& d, const JetSection& xi);
// Evaluates D on explicit component functions.
std::vector<Scalar> op_apply(const OperatorMatrix& d, const std::vector<Scalar>& f);

// Bilinear expression sum c * lambda_alpha * xi_beta in the jets of two scalar fields.
struct BilinearTerm {
  Scalar c;
  MultiIndex lam;
  MultiIndex xi;
};
using Bilinear = std::vector<BilinearTerm>;

// B_1..B_n with lambda (P xi) - (ad(P) lambda) xi = sum_i d_i B_i.
std::vector<Bilinear> green_divergence(const ScalarOperator& p, const DiffContext& ctx);
// Total derivative of a bilinear expression along x_i.
Bilinear total_derivative(const Bilinear& b, unsigned i, const DiffContext& ctx);
// Collects equal jet pairs and drops zeros (canonical form for comparisons).
Bilinear canonical(Bilinear b);

}  // namespace dmod
