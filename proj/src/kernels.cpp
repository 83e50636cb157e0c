#include "beambranch/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace beambranch::kernels {

namespace {

// Partial pivot search and row swap for elimination step k. Returns false
// when no usable pivot exists.
bool select_pivot(Matrix<double>& a, Pivots& pivots, std::size_t k, double pivot_floor) {
  const std::size_t n = a.rows();
  std::size_t best = k;
  double best_abs = std::abs(a(k, k));
  for (std::size_t i = k + 1; i < n; ++i) {
    const double v = std::abs(a(i, k));
    if (v > best_abs) {
      best_abs = v;
      best = i;
    }
  }
  pivots[k] = best;
  if (!(best_abs > pivot_floor)) return false;
  if (best != k) {
    auto rk = a.row(k);
    auto rb = a.row(best);
    for (std::size_t j = 0; j < n; ++j) std::swap(rk[j], rb[j]);
  }
  return true;
}

inline void eliminate_row(Matrix<double>& a, std::size_t k, std::size_t i) {
  const std::size_t n = a.cols();
  const double l = a(i, k) / a(k, k);
  a(i, k) = l;
  if (l == 0.0) return;
  const auto pivot_row = a.row(k);
  auto row = a.row(i);
  for (std::size_t j = k + 1; j < n; ++j) row[j] -= l * pivot_row[j];
}

}  // namespace

void lu_solve(const Matrix<double>& lu, const Pivots& pivots, std::span<double> b) {
  const std::size_t n = lu.rows();
  for (std::size_t k = 0; k < n; ++k) {
    if (pivots[k] != k) std::swap(b[k], b[pivots[k]]);
  }
  for (std::size_t i = 1; i < n; ++i) {
    const auto row = lu.row(i);
    double acc = b[i];
    for (std::size_t j = 0; j < i; ++j) acc -= row[j] * b[j];
    b[i] = acc;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    const auto row = lu.row(ii);
    double acc = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) acc -= row[j] * b[j];
    b[ii] = acc / row[ii];
  }
}

namespace serial {

std::optional<std::size_t> lu_factor(Matrix<double>& a, Pivots& pivots, double pivot_floor) {
  const std::size_t n = a.rows();
  pivots.assign(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    if (!select_pivot(a, pivots, k, pivot_floor)) return k;
    for (std::size_t i = k + 1; i < n; ++i) eliminate_row(a, k, i);
  }
  return std::nullopt;
}

Matrix<double> lu_inverse(const Matrix<double>& lu, const Pivots& pivots) {
  const std::size_t n = lu.rows();
  Matrix<double> inv(n, n);
  std::vector<double> col(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::fill(col.begin(), col.end(), 0.0);
    col[c] = 1.0;
    lu_solve(lu, pivots, col);
    for (std::size_t i = 0; i < n; ++i) inv(i, c) = col[i];
  }
  return inv;
}

}  // namespace serial

namespace omp {

std::optional<std::size_t> lu_factor(Matrix<double>& a, Pivots& pivots, double pivot_floor) {
  const std::size_t n = a.rows();
  pivots.assign(n, 0);
  std::optional<std::size_t> failed;
  // One team for the whole factorization; the pivot step is serialized and
  // the row updates of each step are split across threads.
#pragma omp parallel if (n > 64)
  for (std::size_t k = 0; k < n; ++k) {
#pragma omp single
    if (!select_pivot(a, pivots, k, pivot_floor)) failed = k;
    if (failed) break;
    const auto first = static_cast<std::ptrdiff_t>(k + 1);
    const auto last = static_cast<std::ptrdiff_t>(n);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = first; i < last; ++i) eliminate_row(a, k, static_cast<std::size_t>(i));
  }
  return failed;
}

Matrix<double> lu_inverse(const Matrix<double>& lu, const Pivots& pivots) {
  const std::size_t n = lu.rows();
  Matrix<double> inv(n, n);
  const auto cols = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel
  {
    std::vector<double> col(n);
#pragma omp for schedule(static)
    for (std::ptrdiff_t cc = 0; cc < cols; ++cc) {
      const auto c = static_cast<std::size_t>(cc);
      std::fill(col.begin(), col.end(), 0.0);
      col[c] = 1.0;
      lu_solve(lu, pivots, col);
      for (std::size_t i = 0; i < n; ++i) inv(i, c) = col[i];
    }
  }
  return inv;
}

}  // namespace omp

}  // namespace beambranch::kernels
