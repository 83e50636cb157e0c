#include <doctest.h>

#include <cmath>
#include <random>

#include "beambranch/error.hpp"
#include "beambranch/operators.hpp"
#include "test_support.hpp"

using namespace beambranch;
using testing::mu;

TEST_CASE("n = 3 hinged matrix by hand") {
  const OperatorFactorization op(testing::constant_spec(3, 0, 1));
  const auto& m = op.matrix();
  // A = 16 tridiag(-1,2,-1); A^2 = 256 [[5,-4,1],[-4,6,-4],[1,-4,5]].
  const double want[3][3] = {{5, -4, 1}, {-4, 6, -4}, {1, -4, 5}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(m(i, j) == 256 * want[i][j]);
}

TEST_CASE("constant p gives a symmetric operator") {
  for (real_t p : {real_t(0), real_t(3), real_t(-7.5)}) {
    const OperatorFactorization op(testing::constant_spec(41, p, 1));
    for (std::size_t i = 0; i < 41; ++i)
      for (std::size_t j = 0; j < 41; ++j) CHECK(op.matrix()(i, j) == op.matrix()(j, i));
  }
}

TEST_CASE("sampled sines are exact eigenvectors") {
  const std::size_t n = 199;
  for (real_t p : {real_t(0), real_t(3), real_t(-9)}) {
    const OperatorFactorization op(testing::constant_spec(n, p, 1));
    real_t smallest = -1;
    for (std::size_t k = 1; k <= n; ++k) {
      const Vec s = testing::sine(n, k);
      const real_t m = mu(k, n);
      const real_t ev = m * m + p * m;
      const Vec ls = op.apply(s);
      real_t err = 0;
      for (std::size_t j = 0; j < n; ++j) err = fmaxq(err, fabsq(ls[j] - ev * s[j]));
      CHECK(to_double(err / (ev * sup_norm(s))) < 1e-9);
      if (smallest < 0 || ev < smallest) smallest = ev;
    }
    // The sines span R^n, so the smallest eigenvalue is attained at k = 1.
    CHECK(smallest == mu(1, n) * mu(1, n) + p * mu(1, n));
  }
  const real_t m1 = mu(1, 199);
  CHECK(testing::rel_errd(m1, (2 - 2 * cosq(M_PIq / 200)) * 200 * 200) < 1e-30);
}

TEST_CASE("dense matrix and stencil agree") {
  const ProblemSpec spec = testing::make_spec(60, testing::field("cosine", {1, real_t(0.5), 2}),
                                              testing::field("constant", {1}), testing::field("constant", {1}));
  const OperatorFactorization op(spec);
  std::mt19937_64 rng(7);
  const Vec v = testing::random_vec(rng, 60, -1, 1);
  const Vec lv = op.apply(v);
  for (std::size_t i = 0; i < 60; ++i) {
    real_t dense = 0;
    for (std::size_t j = 0; j < 60; ++j) dense += real_t(op.matrix()(i, j)) * v[j];
    CHECK(to_double(fabsq(dense - lv[i]) / sup_norm(lv)) < 1e-12);
  }
}

TEST_CASE("solves") {
  const std::size_t n = 199;
  SUBCASE("zero right-hand side") {
    const OperatorFactorization op(testing::constant_spec(n, 0, 1));
    CHECK(solve(op, Vec(n, 0)) == Vec(n, 0));
  }
  SUBCASE("eigen-identity right-hand sides") {
    for (real_t p : {real_t(0), real_t(3)}) {
      const OperatorFactorization op(testing::constant_spec(n, p, 1));
      const real_t m = mu(1, n);
      const Vec v = op.solve(testing::sine(n));
      const Vec want = testing::sine(n, 1, 1 / (m * m + p * m));
      CHECK(to_double(testing::max_abs_diff(v, want) / sup_norm(want)) < 1e-9);
    }
  }
  SUBCASE("solve inverts multiply") {
    const ProblemSpec spec = testing::make_spec(n, testing::field("affine", {2, -3}),
                                                testing::field("constant", {1}), testing::field("constant", {1}));
    const OperatorFactorization op(spec);
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 5; ++trial) {
      const Vec x = testing::random_vec(rng, n, -1, 1);
      const Vec back = op.solve(op.apply(x));
      CHECK(to_double(testing::max_abs_diff(back, x) / sup_norm(x)) < 1e-10);
      const Vec g = testing::random_vec(rng, n, -1, 1);
      const Vec r = op.apply(op.solve(g));
      CHECK(to_double(testing::max_abs_diff(r, g)) <= 1e-10 * (1 + to_double(sup_norm(g))));
    }
  }
  SUBCASE("length mismatch") {
    const OperatorFactorization op(testing::constant_spec(9, 0, 1));
    CHECK_THROWS_AS(op.solve(Vec(8, 1)), Error);
  }
}

TEST_CASE("smallest eigenvalue converges at second order") {
  // mu_1^2 - pi^4 = -pi^6 h^2 / 6 + O(h^4).
  real_t prev = 0;
  for (std::size_t n : {99u, 199u, 399u}) {
    const real_t err = fabsq(mu(1, n) * mu(1, n) - testing::pi4());
    if (prev != 0) {
      const double ratio = to_double(prev / err);
      CHECK(ratio >= 3.5);
      CHECK(ratio <= 4.5);
    }
    prev = err;
  }
}

TEST_CASE("resolvent positivity") {
  for (real_t p : {real_t(0), real_t(5), real_t(-9)}) {
    const OperatorFactorization op(testing::constant_spec(50, p, 1));
    const auto report = check_inverse_positivity(op);
    CHECK(report.positive);
    CHECK(report.min_entry >= inverse_positivity_floor);
  }
  // p dips to -14 < -pi^2 near the ends: diagnostic only, but the report must be well formed.
  const ProblemSpec bad = testing::make_spec(50, testing::field("cosine", {0, -15, 1}),
                                             testing::field("constant", {1}), testing::field("constant", {1}));
  try {
    const auto report = check_inverse_positivity(OperatorFactorization(bad));
    CHECK(std::isfinite(report.min_entry));
    CHECK(report.positive == (report.min_entry >= inverse_positivity_floor));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularOperator);
  }
}

TEST_CASE("inverse norm") {
  // For p = 0 the inverse is positive, so ||L^-1||_inf = max(L^-1 1); the
  // continuum solution of u'''' = 1 with hinged ends peaks at 5/384.
  const std::size_t n = 199;
  const OperatorFactorization op(testing::constant_spec(n, 0, 1));
  const Vec v = op.solve(Vec(n, 1));
  // inv_norm comes from the unrefined double inverse; cond(L_h) ~ 1e9 at n = 199.
  CHECK(std::abs(op.inv_norm() - to_double(sup_norm(v))) < 1e-6 * op.inv_norm());
  CHECK(std::abs(op.inv_norm() - 5.0 / 384) < 1e-3 * 5.0 / 384);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec g = testing::random_vec(rng, n, -1, 1);
    CHECK(to_double(sup_norm(op.solve(g))) <= op.inv_norm() * to_double(sup_norm(g)) * (1 + 1e-6));
  }
}

TEST_CASE("hinged E-norm of the first mode") {
  const std::size_t n = 199;
  const real_t h = real_t(1) / (n + 1);
  CHECK(testing::rel_errd(hinged_e_norm(testing::sine(n), h), M_PIq * M_PIq) < 1e-3);
  CHECK(hinged_e_norm(Vec(n, 0), h) == 0);
}

TEST_CASE("singular operator is reported") {
  // p = -mu_1 makes A^2 + pA = A(A - mu_1) singular.
  const std::size_t n = 20;
  const ProblemSpec spec = testing::constant_spec(n, -mu(1, n), 1);
  try {
    OperatorFactorization op(spec);
    // Round-off may leave a tiny pivot; the refined solve must then be huge.
    CHECK(op.inv_norm() > 1e10);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularOperator);
  }
}
