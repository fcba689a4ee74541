#include "dmod/linalg.hpp"

#include <limits>

namespace dmod {
namespace {

std::size_t cost(const Rational& r) { return mpz_sizeinbase(r.get_num_mpz_t(), 2) + mpz_sizeinbase(r.get_den_mpz_t(), 2); }

std::size_t cost(const Scalar& s) {
  if (s.is_constant()) return cost(s.constant());
  return 1000 * (s.numerator().terms().size() + s.denominator().terms().size());
}

bool is_zero(const Rational& r) { return r == 0; }
bool is_zero(const Scalar& s) { return s.is_zero(); }

template <class T>
std::vector<std::size_t> rref_impl(Matrix<T>& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
    std::size_t best = m.rows;
    std::size_t best_cost = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = r; i < m.rows; ++i) {
      if (is_zero(m(i, c))) continue;
      std::size_t k = cost(m(i, c));
      if (k < best_cost) {
        best = i;
        best_cost = k;
      }
    }
    if (best == m.rows) continue;
    if (best != r)
      for (std::size_t j = 0; j < m.cols; ++j) std::swap(m(r, j), m(best, j));
    T inv = T(1) / m(r, c);
    for (std::size_t j = c; j < m.cols; ++j)
      if (!is_zero(m(r, j))) m(r, j) = m(r, j) * inv;
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (i == r || is_zero(m(i, c))) continue;
      T f = m(i, c);
      for (std::size_t j = c; j < m.cols; ++j)
        if (!is_zero(m(r, j))) m(i, j) = m(i, j) - f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

template <class T>
std::vector<std::vector<T>> kernel_impl(Matrix<T> m) {
  auto pivots = rref_impl(m);
  std::vector<bool> is_pivot(m.cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::vector<T>> out;
  for (std::size_t f = 0; f < m.cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<T> v(m.cols);
    v[f] = T(1);
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = T(0) - m(r, f);
    out.push_back(std::move(v));
  }
  return out;
}

template <class T>
Matrix<T> transpose_impl(const Matrix<T>& m) {
  Matrix<T> t(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
  return t;
}

}  // namespace

std::vector<std::size_t> rref(QMatrix& m) { return rref_impl(m); }
std::vector<std::size_t> rref(KMatrix& m) { return rref_impl(m); }
std::size_t rank(QMatrix m) { return rref_impl(m).size(); }
std::size_t rank(KMatrix m) { return rref_impl(m).size(); }
std::vector<std::vector<Rational>> kernel(QMatrix m) { return kernel_impl(std::move(m)); }
std::vector<std::vector<Scalar>> kernel(KMatrix m) { return kernel_impl(std::move(m)); }
std::vector<std::vector<Rational>> left_kernel(const QMatrix& m) { return kernel_impl(transpose_impl(m)); }
std::vector<std::vector<Scalar>> left_kernel(const KMatrix& m) { return kernel_impl(transpose_impl(m)); }
QMatrix transpose(const QMatrix& m) { return transpose_impl(m); }
KMatrix transpose(const KMatrix& m) { return transpose_impl(m); }

std::optional<std::vector<Scalar>> solve(const KMatrix& m, const std::vector<Scalar>& b) {
  KMatrix aug(m.rows, m.cols + 1);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) aug(i, j) = m(i, j);
    aug(i, m.cols) = b[i];
  }
  auto pivots = rref_impl(aug);
  if (!pivots.empty() && pivots.back() == m.cols) return std::nullopt;
  std::vector<Scalar> x(m.cols);
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(r, m.cols);
  return x;
}

}  // namespace dmod
