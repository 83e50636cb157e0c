#pragma once

// Data-parallel inner loops. Every kernel in `omp` has a reference twin in
// `serial`; the two produce bitwise-identical results because each output
// entry is computed by one thread with the same summation order.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "beambranch/matrix.hpp"

namespace beambranch::kernels {

// Row-interchange record of an LU factorization: row k was swapped with
// row pivots[k] at elimination step k.
using Pivots = std::vector<std::size_t>;

// Forward/back substitution against a factorization from lu_factor.
void lu_solve(const Matrix<double>& lu, const Pivots& pivots, std::span<double> b);

namespace serial {

// In-place LU with partial (row) pivoting. Returns the elimination step at
// which the largest available pivot magnitude was <= pivot_floor.
std::optional<std::size_t> lu_factor(Matrix<double>& a, Pivots& pivots, double pivot_floor);

// Columns of A^{-1} from a factorization.
Matrix<double> lu_inverse(const Matrix<double>& lu, const Pivots& pivots);

template <class T>
void matvec(const Matrix<T>& m, std::span<const T> x, std::span<T> y) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    T acc = T(0);
    for (std::size_t j = 0; j < m.cols(); ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

// out(i, j) = left[i] * m(i, j) * right[j]
template <class T, class Out>
void scale_rows_cols(const Matrix<T>& m, std::span<const T> left, std::span<const T> right,
                     Matrix<Out>& out) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) dst[j] = static_cast<Out>(left[i] * row[j] * right[j]);
  }
}

}  // namespace serial

namespace omp {

std::optional<std::size_t> lu_factor(Matrix<double>& a, Pivots& pivots, double pivot_floor);

Matrix<double> lu_inverse(const Matrix<double>& lu, const Pivots& pivots);

template <class T>
void matvec(const Matrix<T>& m, std::span<const T> x, std::span<T> y) {
  const auto rows = static_cast<std::ptrdiff_t>(m.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto row = m.row(static_cast<std::size_t>(i));
    T acc = T(0);
    for (std::size_t j = 0; j < m.cols(); ++j) acc += row[j] * x[j];
    y[static_cast<std::size_t>(i)] = acc;
  }
}

template <class T, class Out>
void scale_rows_cols(const Matrix<T>& m, std::span<const T> left, std::span<const T> right,
                     Matrix<Out>& out) {
  const auto rows = static_cast<std::ptrdiff_t>(m.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto row = m.row(i);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) dst[j] = static_cast<Out>(left[i] * row[j] * right[j]);
  }
}

}  // namespace omp

}  // namespace beambranch::kernels
