#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dmod/operator.hpp"

namespace dmod {

// Term order on pairs (column, mu). Columns carry a block number and a
// higher block always dominates; inside a block terms compare by order,
// then reverse lexicographically on mu, then by ascending column index.
struct TermOrder {
  unsigned n = 0;
  std::vector<std::uint8_t> block;  // one entry per column

  static TermOrder single_block(unsigned n, std::size_t m) { return {n, std::vector<std::uint8_t>(m, 0)}; }
  std::uint64_t key(unsigned col, const MultiIndex& mu) const;
};

struct CompletionOptions {
  // Maximal order of a leading term; negative selects 3q + 6.
  int order_cap = -1;
  // Elements whose leading term falls into block 0 are discarded instead of
  // kept; block-0 columns then only record how rows were combined.
  bool discard_lower_block = false;
};

// Janet basis of a row module over D. Generators are normalized to leading
// coefficient 1.
class InvolutiveBasis {
 public:
  struct Term {
    std::uint64_t key;
    MultiIndex mu;
    std::uint16_t col;
  };
  using Entry = std::pair<Term, Scalar>;
  using Sparse = std::vector<Entry>;  // descending key

  struct NormalForm {
    Row remainder;
    // f = sum cofactors[g] ∘ generator(g) + remainder
    std::map<std::size_t, ScalarOperator> cofactors;
    bool is_zero() const;
  };

  InvolutiveBasis(ContextPtr ctx, std::size_t m, TermOrder order, CompletionOptions opts = {});
  static InvolutiveBasis of(const OperatorMatrix& d, CompletionOptions opts = {});

  // Queue rows; complete() integrates them into the basis.
  void add(const Row& row);
  void complete();

  std::size_t size() const { return elems_.size(); }
  std::size_t cols() const { return m_; }
  Row generator(std::size_t i) const;
  OperatorMatrix generators() const;
  std::pair<unsigned, MultiIndex> leading(std::size_t i) const;
  // 1-based multiplicative derivation indices of generator i.
  std::vector<unsigned> multiplicative(std::size_t i) const;
  int order() const;
  const TermOrder& term_order() const { return order_; }
  const ContextPtr& context() const { return ctx_; }
  // Number of non-multiplicative prolongations reduced in the final check.
  std::size_t certified_prolongations() const { return certified_; }

  NormalForm normal_form(const Row& f, bool with_cofactors = false) const;
  bool reduces_to_zero(const Row& f) const;

  Sparse to_sparse(const Row& row) const;
  Row to_row(const Sparse& s) const;

 private:
  struct Elem {
    Sparse poly;
    std::uint8_t mult = 0;       // bit i-1 set when d_i is multiplicative
    std::uint8_t prolonged = 0;  // non-multiplicative directions already handled
    std::shared_ptr<std::map<MultiIndex, Sparse>> shifts;
  };

  const Sparse& shifted(std::size_t e, const MultiIndex& nu) const;
  Sparse derive_once(const Sparse& s, unsigned i) const;
  Sparse reduce(Sparse f, std::map<std::size_t, ScalarOperator>* cof) const;
  std::optional<std::size_t> divisor(const Term& t) const;
  void assign_multiplicative();
  void insert(Sparse h, std::vector<Sparse>& queue);
  Term make_term(unsigned col, const MultiIndex& mu) const { return {order_.key(col, mu), mu, static_cast<std::uint16_t>(col)}; }

  ContextPtr ctx_;
  std::size_t m_;
  TermOrder order_;
  CompletionOptions opts_;
  int cap_ = -1;
  std::vector<Elem> elems_;
  std::vector<Sparse> pending_;
  std::size_t certified_ = 0;
};

struct Membership {
  bool member = false;
  // f = sum_j cofactors[j] ∘ row_j(D) when member.
  Row cofactors;
};

// Decides whether f lies in the row module of D, with cofactors.
Membership row_module_membership(const Row& f, const OperatorMatrix& d, CompletionOptions opts = {});

struct ModuleComparison {
  bool equal = false;
  // When unequal: a row of one side outside the other's module.
  std::optional<Row> witness;
  bool witness_from_second = false;
};

ModuleComparison row_module_equal(const OperatorMatrix& a, const OperatorMatrix& b, CompletionOptions opts = {});

// Generating compatibility conditions D1 with D1∘D = 0; 0 rows when none.
OperatorMatrix compatibility_conditions(const OperatorMatrix& d, CompletionOptions opts = {});

// Removes rows lying in the module of earlier (lower) rows.
OperatorMatrix prune_generators(const OperatorMatrix& d, CompletionOptions opts = {});

struct Resolution {
  std::vector<OperatorMatrix> maps;  // D, D1, D2, ...
  bool exact_end = false;            // last CC computation returned no rows
};

Resolution free_resolution(const OperatorMatrix& d, unsigned max_length, CompletionOptions opts = {});

}  // namespace dmod
