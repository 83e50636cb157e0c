#include <doctest.h>
#include <omp.h>

#include <random>

#include "beambranch/kernels.hpp"
#include "beambranch/precision.hpp"
#include "test_support.hpp"

using namespace beambranch;

namespace {

Matrix<double> random_matrix(std::size_t n, std::uint64_t seed, double diag_boost = 0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1, 1);
  Matrix<double> m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = dist(rng) + (i == j ? diag_boost : 0);
  return m;
}

// Restores the OpenMP team size when a test changes it.
struct ThreadCount {
  explicit ThreadCount(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~ThreadCount() { omp_set_num_threads(saved); }
  int saved;
};

}  // namespace

TEST_CASE("parallel LU matches the serial reference bitwise") {
  for (int threads : {1, 2, 3, 4}) {
    ThreadCount guard(threads);
    Matrix<double> a = random_matrix(97, 11);
    Matrix<double> b = a;
    kernels::Pivots pa, pb;
    CHECK_FALSE(kernels::serial::lu_factor(a, pa, 0.0));
    CHECK_FALSE(kernels::omp::lu_factor(b, pb, 0.0));
    CHECK(pa == pb);
    CHECK(a == b);
    CHECK(kernels::serial::lu_inverse(a, pa) == kernels::omp::lu_inverse(b, pb));
  }
}

TEST_CASE("LU solve reproduces the right-hand side") {
  const std::size_t n = 60;
  const Matrix<double> a = random_matrix(n, 5);
  Matrix<double> lu = a;
  kernels::Pivots piv;
  REQUIRE_FALSE(kernels::omp::lu_factor(lu, piv, 0.0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-1, 1);
  std::vector<double> x(n), b(n);
  for (auto& v : x) v = dist(rng);
  kernels::serial::matvec<double>(a, x, b);
  kernels::lu_solve(lu, piv, b);
  for (std::size_t i = 0; i < n; ++i) CHECK(b[i] == doctest::Approx(x[i]).epsilon(1e-10));
}

TEST_CASE("LU reports the breakdown step of a singular matrix") {
  Matrix<double> a(3, 3);
  a(0, 0) = 1;
  a(0, 1) = 2;
  a(1, 0) = 2;
  a(1, 1) = 4;  // second row is twice the first
  a(2, 2) = 1;
  kernels::Pivots piv;
  const auto bad = kernels::serial::lu_factor(a, piv, 1e-14);
  REQUIRE(bad);
  CHECK(*bad == 1);
}

TEST_CASE("row-parallel matvec and scaling are independent of the partition") {
  std::mt19937_64 rng(17);
  const std::size_t n = 73;
  Matrix<real_t> m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = testing::random_vec(rng, 1, 0, 2)[0];
  const Vec x = testing::random_vec(rng, n, -1, 1);
  const Vec left = testing::random_vec(rng, n, -1, 1);

  Vec ref(n);
  kernels::serial::matvec<real_t>(m, x, ref);
  Matrix<double> ref_scaled(n, n);
  kernels::serial::scale_rows_cols<real_t, double>(m, left, x, ref_scaled);

  for (int threads : {1, 2, 5}) {
    ThreadCount guard(threads);
    Vec y(n);
    kernels::omp::matvec<real_t>(m, x, y);
    CHECK(y == ref);
    Matrix<double> scaled(n, n);
    kernels::omp::scale_rows_cols<real_t, double>(m, left, x, scaled);
    CHECK(scaled == ref_scaled);
  }
}
