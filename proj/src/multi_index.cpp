#include "dmod/multi_index.hpp"

#include <algorithm>

namespace dmod {

MultiIndex MultiIndex::from_list(const std::vector<unsigned>& idx) {
  MultiIndex m;
  for (auto i : idx) ++m.c.at(i - 1);
  return m;
}

std::string MultiIndex::index_list() const {
  std::string s;
  for (unsigned i = 0; i < kMaxVars; ++i)
    for (unsigned k = 0; k < c[i]; ++k) {
      if (!s.empty()) s += ",";
      s += std::to_string(i + 1);
    }
  return s;
}

int grevlex_compare(const MultiIndex& a, const MultiIndex& b) {
  unsigned da = a.order(), db = b.order();
  if (da != db) return da > db ? 1 : -1;
  for (unsigned i = kMaxVars; i > 0; --i) {
    if (a.c[i - 1] != b.c[i - 1]) return a.c[i - 1] < b.c[i - 1] ? 1 : -1;
  }
  return 0;
}

namespace {

void enumerate(unsigned n, unsigned pos, unsigned remaining, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (pos + 1 == n) {
    cur.c[pos] = static_cast<std::uint8_t>(remaining);
    out.push_back(cur);
    cur.c[pos] = 0;
    return;
  }
  for (unsigned k = remaining + 1; k > 0; --k) {
    cur.c[pos] = static_cast<std::uint8_t>(k - 1);
    enumerate(n, pos + 1, remaining - (k - 1), cur, out);
  }
  cur.c[pos] = 0;
}

}  // namespace

std::vector<MultiIndex> multi_indices_of_order(unsigned n, unsigned k) {
  std::vector<MultiIndex> out;
  if (n == 0) {
    if (k == 0) out.emplace_back();
    return out;
  }
  MultiIndex cur;
  enumerate(n, 0, k, cur, out);
  std::sort(out.begin(), out.end(), [](const MultiIndex& a, const MultiIndex& b) { return grevlex_compare(a, b) > 0; });
  return out;
}

std::vector<MultiIndex> multi_indices_up_to(unsigned n, unsigned k) {
  std::vector<MultiIndex> out;
  for (unsigned d = 0; d <= k; ++d) {
    auto level = multi_indices_of_order(n, d);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

std::uint64_t binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Rational binomial(const MultiIndex& mu, const MultiIndex& kappa) {
  Rational r(1);
  for (unsigned i = 0; i < kMaxVars; ++i) r *= static_cast<unsigned long>(binomial(mu.c[i], kappa.c[i]));
  return r;
}

Rational factorial(const MultiIndex& mu) {
  Rational r(1);
  for (unsigned i = 0; i < kMaxVars; ++i)
    for (unsigned k = 2; k <= mu.c[i]; ++k) r *= k;
  return r;
}

std::vector<MultiIndex> sub_indices(const MultiIndex& mu) {
  std::vector<MultiIndex> out{MultiIndex{}};
  for (unsigned i = 0; i < kMaxVars; ++i) {
    if (mu.c[i] == 0) continue;
    std::vector<MultiIndex> next;
    for (const auto& base : out)
      for (unsigned k = 0; k <= mu.c[i]; ++k) {
        MultiIndex m = base;
        m.c[i] = static_cast<std::uint8_t>(k);
        next.push_back(m);
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace dmod
