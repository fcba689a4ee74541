#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dmod/scalar.hpp"

namespace dmod {

// Dense row-major matrix over a field (Rational or Scalar).
template <class T>
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}
  T& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
  void append_row(const std::vector<T>& row) {
    a.insert(a.end(), row.begin(), row.end());
    ++rows;
  }
};

using QMatrix = Matrix<Rational>;
using KMatrix = Matrix<Scalar>;

// Reduced row echelon form in place; returns pivot columns in row order.
std::vector<std::size_t> rref(QMatrix& m);
std::vector<std::size_t> rref(KMatrix& m);

std::size_t rank(QMatrix m);
std::size_t rank(KMatrix m);

// Basis of the right kernel {v : M v = 0}, one vector per free column.
std::vector<std::vector<Rational>> kernel(QMatrix m);
std::vector<std::vector<Scalar>> kernel(KMatrix m);

// Basis of the left kernel {w : w M = 0}.
std::vector<std::vector<Rational>> left_kernel(const QMatrix& m);
std::vector<std::vector<Scalar>> left_kernel(const KMatrix& m);

QMatrix transpose(const QMatrix& m);
KMatrix transpose(const KMatrix& m);

// One solution of M v = b (free unknowns set to zero), nullopt when inconsistent.
std::optional<std::vector<Scalar>> solve(const KMatrix& m, const std::vector<Scalar>& b);

}  // namespace dmod
