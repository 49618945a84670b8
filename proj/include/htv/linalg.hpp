#ifndef HTV_LINALG_HPP
#define HTV_LINALG_HPP

#include <cstddef>
#include <vector>

#include "rational.hpp"

namespace htv {

using RatVec = std::vector<Rational>;
using RatMat = std::vector<RatVec>;  // row major

// Exact Gaussian elimination.  Solves A x = b for possibly overdetermined
// systems; free variables are set to zero.
template <class Vec>
struct LinearSolution {
  bool consistent = false;
  Vec x;
  std::size_t rank = 0;
};

// Vec must support: size(), operator[], element ops -= and scalar multiply via
// axpy below.  Instantiated with RatVec and with vectors of module elements.
namespace detail {

inline void axpy_scalar(RatVec& y, const Rational& a, std::size_t src, std::size_t dst) {
  y[dst] -= a * y[src];
}

}  // namespace detail

inline LinearSolution<RatVec> solve_exact(RatMat a, RatVec b) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    std::swap(b[piv], b[r]);
    const Rational inv = Rational(1) / a[r][c];
    for (std::size_t j = c; j < cols; ++j) a[r][j] *= inv;
    b[r] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      const Rational f = a[i][c];
      for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
      b[i] -= f * b[r];
    }
    pivot_col.push_back(c);
    ++r;
  }
  LinearSolution<RatVec> out;
  out.rank = r;
  for (std::size_t i = r; i < rows; ++i)
    if (b[i] != 0) return out;  // inconsistent
  out.consistent = true;
  out.x.assign(cols, Rational(0));
  for (std::size_t i = 0; i < r; ++i) out.x[pivot_col[i]] = b[i];
  return out;
}

inline std::size_t rank_exact(RatMat a) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    const Rational inv = Rational(1) / a[r][c];
    for (std::size_t j = c; j < cols; ++j) a[r][j] *= inv;
    for (std::size_t i = r + 1; i < rows; ++i) {
      if (a[i][c] == 0) continue;
      const Rational f = a[i][c];
      for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    ++r;
  }
  return r;
}

// Solve A x = b where b has entries in a vector space W over the rationals
// (W needs +, -, scalar *, default zero).  The elimination is driven by the
// scalar matrix alone.
template <class W>
LinearSolution<std::vector<W>> solve_exact_valued(RatMat a, std::vector<W> b) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    std::swap(b[piv], b[r]);
    const Rational inv = Rational(1) / a[r][c];
    for (std::size_t j = c; j < cols; ++j) a[r][j] *= inv;
    b[r] = b[r] * inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      const Rational f = a[i][c];
      for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
      b[i] = b[i] - b[r] * f;
    }
    pivot_col.push_back(c);
    ++r;
  }
  LinearSolution<std::vector<W>> out;
  out.rank = r;
  for (std::size_t i = r; i < rows; ++i)
    if (!b[i].is_zero()) return out;
  out.consistent = true;
  out.x.assign(cols, W());
  for (std::size_t i = 0; i < r; ++i) out.x[pivot_col[i]] = b[i];
  return out;
}

}  // namespace htv

#endif
