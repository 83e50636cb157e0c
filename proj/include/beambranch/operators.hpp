#pragma once

// Discrete hinged beam operator L_h = A^2 + diag(p) A approximating
// u'''' - p(x) u'' with u = u'' = 0 at both ends, where A = tridiag(-1,2,-1)/h^2
// is the Dirichlet second-difference matrix (discrete -d^2/dx^2).

#include <cstddef>
#include <span>

#include "beambranch/kernels.hpp"
#include "beambranch/matrix.hpp"
#include "beambranch/precision.hpp"
#include "beambranch/problem.hpp"

namespace beambranch {

class SecondDifference {
 public:
  SecondDifference(std::size_t n, real_t h) : n_(n), h_(h) {}

  std::size_t n() const noexcept { return n_; }
  real_t h() const noexcept { return h_; }

  // (A v)_j = ((v_j - v_{j-1}) + (v_j - v_{j+1})) / h^2 with v_0 = v_{n+1} = 0.
  Vec apply(std::span<const real_t> v) const;
  Matrix<double> dense() const;

 private:
  std::size_t n_;
  real_t h_;
};

class OperatorFactorization {
 public:
  explicit OperatorFactorization(const ProblemSpec& spec);

  std::size_t size() const noexcept { return stencil_.n(); }
  real_t h() const noexcept { return stencil_.h(); }
  const Vec& p() const noexcept { return p_; }

  // Assembled L_h in double.
  const Matrix<double>& matrix() const noexcept { return matrix_; }

  // ||L_h^{-1}||_inf, the discrete bound constant of ||v|| <= C ||L v||.
  double inv_norm() const noexcept { return inv_norm_; }

  // L_h v evaluated through the stencil, A(Av) + p .* (Av), in working precision.
  Vec apply(std::span<const real_t> v) const;

  // L_h v = g by LU with iterative refinement in working precision.
  Vec solve(std::span<const real_t> g) const;

  // Unrefined double-precision solve, in place.
  void solve_in_place(std::span<double> g) const;

  const Matrix<double>& lu() const noexcept { return lu_; }
  const kernels::Pivots& pivots() const noexcept { return pivots_; }

 private:
  SecondDifference stencil_;
  Vec p_;
  Matrix<double> matrix_;
  Matrix<double> lu_;
  kernels::Pivots pivots_;
  double inv_norm_ = 0;
};

OperatorFactorization assemble_operator(const ProblemSpec& spec);

Vec solve(const OperatorFactorization& op, std::span<const real_t> g);

struct InversePositivityReport {
  double min_entry;
  bool positive;
};

inline constexpr double inverse_positivity_floor = -1e-12;

// Every column of L_h^{-1} (n refined solves); positive iff min entry >= -1e-12.
InversePositivityReport check_inverse_positivity(const OperatorFactorization& op);

// max(||u||_inf, ||u'||_inf, ||u''||_inf) by difference stencils, with the
// hinged boundary values appended.
real_t hinged_e_norm(std::span<const real_t> u, real_t h);

// Factor a dense double matrix; throws SingularOperator on pivot breakdown.
void factor_or_throw(Matrix<double>& a, kernels::Pivots& pivots, const char* what);

}  // namespace beambranch
