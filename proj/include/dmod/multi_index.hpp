#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "dmod/rational.hpp"

namespace dmod {

inline constexpr unsigned kMaxVars = 6;

// Derivative counts mu = (mu_1, ..., mu_n); unused slots stay zero.
struct MultiIndex {
  std::array<std::uint8_t, kMaxVars> c{};

  static MultiIndex unit(unsigned i) {
    MultiIndex m;
    m.c[i - 1] = 1;
    return m;
  }
  // From a list of 1-based indices with repetition: {1,2,2} -> d_122.
  static MultiIndex from_list(const std::vector<unsigned>& idx);

  unsigned order() const {
    unsigned s = 0;
    for (auto v : c) s += v;
    return s;
  }
  unsigned operator[](unsigned i) const { return c[i - 1]; }  // 1-based
  // Smallest i with mu_i != 0; 0 for the empty index.
  unsigned cls() const {
    for (unsigned i = 0; i < kMaxVars; ++i)
      if (c[i]) return i + 1;
    return 0;
  }
  // Largest i with mu_i != 0; 0 for the empty index.
  unsigned last() const {
    for (unsigned i = kMaxVars; i > 0; --i)
      if (c[i - 1]) return i;
    return 0;
  }
  bool divides(const MultiIndex& o) const {
    for (unsigned i = 0; i < kMaxVars; ++i)
      if (c[i] > o.c[i]) return false;
    return true;
  }
  MultiIndex operator+(const MultiIndex& o) const {
    MultiIndex r;
    for (unsigned i = 0; i < kMaxVars; ++i) r.c[i] = static_cast<std::uint8_t>(c[i] + o.c[i]);
    return r;
  }
  // Requires o.divides(*this).
  MultiIndex operator-(const MultiIndex& o) const {
    MultiIndex r;
    for (unsigned i = 0; i < kMaxVars; ++i) r.c[i] = static_cast<std::uint8_t>(c[i] - o.c[i]);
    return r;
  }
  MultiIndex plus(unsigned i) const {
    MultiIndex r = *this;
    ++r.c[i - 1];
    return r;
  }
  bool operator==(const MultiIndex&) const = default;
  auto operator<=>(const MultiIndex&) const = default;

  // "" for the empty index, otherwise the digit list "12" / "1,12" style used by d[...].
  std::string index_list() const;
};

// Degree-first reverse lexicographic comparison: larger order wins; at equal
// order the index with the smaller count in the highest variable is larger.
int grevlex_compare(const MultiIndex& a, const MultiIndex& b);

// All multi-indices of length exactly k in n variables, in descending grevlex order.
std::vector<MultiIndex> multi_indices_of_order(unsigned n, unsigned k);
// All multi-indices with length <= k, grouped by ascending length.
std::vector<MultiIndex> multi_indices_up_to(unsigned n, unsigned k);

// prod_i binomial(mu_i, kappa_i).
Rational binomial(const MultiIndex& mu, const MultiIndex& kappa);
std::uint64_t binomial(unsigned n, unsigned k);
// mu! = prod mu_i!
Rational factorial(const MultiIndex& mu);

// Sub-indices kappa <= mu (componentwise).
std::vector<MultiIndex> sub_indices(const MultiIndex& mu);

}  // namespace dmod
