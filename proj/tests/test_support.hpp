#pragma once

// Builders and closed-form oracles shared by the unit and acceptance tests.
// The oracles are written from the constant-coefficient theory only and do
// not call into the solver.

#include <cstddef>
#include <random>
#include <string>

#include "beambranch/precision.hpp"
#include "beambranch/problem.hpp"

namespace beambranch::testing {

inline FieldSource field(std::string kind, std::vector<real_t> params) { return {std::move(kind), std::move(params)}; }

inline ProblemSpec make_spec(std::size_t n, FieldSource p, FieldSource a, FieldSource f, real_t rho = 1,
                             real_t sigma = 2) {
  ProblemConfig c;
  c.p = std::move(p);
  c.a = std::move(a);
  c.f = std::move(f);
  c.rho = rho;
  c.sigma = sigma;
  return build_problem(c, n);
}

inline ProblemSpec constant_spec(std::size_t n, real_t p, real_t a, real_t f = 1, real_t rho = 1, real_t sigma = 2) {
  return make_spec(n, field("constant", {p}), field("constant", {a}), field("constant", {f}), rho, sigma);
}

// Eigenvalues of tridiag(-1,2,-1)/h^2 with h = 1/(n+1):
// mu_k = (2 - 2 cos(k pi h))/h^2 = 4 sin^2(k pi h / 2)/h^2.
inline real_t mu(std::size_t k, std::size_t n) {
  const real_t h = real_t(1) / real_t(n + 1);
  const real_t s = sinq(M_PIq * real_t(k) * h / 2);
  return 4 * s * s / (h * h);
}

inline Vec sine(std::size_t n, std::size_t k = 1, real_t amplitude = 1) {
  Vec v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = amplitude * sinq(M_PIq * real_t(k) * real_t(j + 1) / real_t(n + 1));
  return v;
}

inline real_t pi4() { return M_PIq * M_PIq * M_PIq * M_PIq; }

inline real_t rel_err(real_t got, real_t want) { return fabsq(got - want) / fabsq(want); }
inline double rel_errd(real_t got, real_t want) { return static_cast<double>(rel_err(got, want)); }

inline real_t max_abs_diff(std::span<const real_t> x, std::span<const real_t> y) {
  real_t m = 0;
  for (std::size_t j = 0; j < x.size(); ++j) m = fmaxq(m, fabsq(x[j] - y[j]));
  return m;
}

inline Vec random_vec(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vec v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

}  // namespace beambranch::testing
