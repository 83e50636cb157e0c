// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>

#include "beambranch/kernels.hpp"
#include "beambranch/precision.hpp"

using namespace beambranch;

namespace {

Matrix<double> random_matrix(std::size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> dist(-1, 1);
  Matrix<double> m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = dist(rng) + (i == j ? 4.0 : 0.0);
  return m;
}

Matrix<real_t> random_kernel(std::size_t n) {
  const Matrix<double> d = random_matrix(n);
  Matrix<real_t> m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = d(i, j);
  return m;
}

Vec random_vec(std::size_t n) {
  std::mt19937_64 rng(n + 1);
  std::uniform_real_distribution<double> dist(0, 1);
  Vec v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

template <auto Factor>
void lu_factor(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix<double> a = random_matrix(n);
  kernels::Pivots piv;
  for (auto _ : state) {
    Matrix<double> lu = a;
    benchmark::DoNotOptimize(Factor(lu, piv, 0.0));
  }
}

template <auto Factor, auto Inverse>
void lu_inverse(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Matrix<double> lu = random_matrix(n);
  kernels::Pivots piv;
  Factor(lu, piv, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(Inverse(lu, piv));
}

template <auto MatVec>
void theta_matvec(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix<real_t> f = random_kernel(n);
  const Vec x = random_vec(n);
  Vec y(n);
  for (auto _ : state) {
    MatVec(f, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

template <auto Scale>
void jacobian_scaling(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix<real_t> f = random_kernel(n);
  const Vec left = random_vec(n), right = random_vec(n);
  Matrix<double> out(n, n);
  for (auto _ : state) {
    Scale(f, left, right, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

#define SIZES ->Arg(99)->Arg(199)->Arg(399)->Unit(benchmark::kMillisecond)

BENCHMARK(lu_factor<kernels::serial::lu_factor>)->Name("lu_factor/serial") SIZES;
BENCHMARK(lu_factor<kernels::omp::lu_factor>)->Name("lu_factor/omp") SIZES;
BENCHMARK(lu_inverse<kernels::serial::lu_factor, kernels::serial::lu_inverse>)->Name("lu_inverse/serial") SIZES;
BENCHMARK(lu_inverse<kernels::serial::lu_factor, kernels::omp::lu_inverse>)->Name("lu_inverse/omp") SIZES;
BENCHMARK(theta_matvec<kernels::serial::matvec<real_t>>)->Name("theta_matvec/serial") SIZES;
BENCHMARK(theta_matvec<kernels::omp::matvec<real_t>>)->Name("theta_matvec/omp") SIZES;
BENCHMARK(jacobian_scaling<kernels::serial::scale_rows_cols<real_t, double>>)->Name("jacobian_scaling/serial") SIZES;
BENCHMARK(jacobian_scaling<kernels::omp::scale_rows_cols<real_t, double>>)->Name("jacobian_scaling/omp") SIZES;

BENCHMARK_MAIN();
