#pragma once

// Nonlocal interaction theta_w(x) = int_0^1 f(x,y) |w(y)|^sigma dy, sampled
// on the grid with trapezoid weights h (boundary values are zero).

#include <span>

#include "beambranch/matrix.hpp"
#include "beambranch/precision.hpp"
#include "beambranch/problem.hpp"

namespace beambranch {

class NonlocalEvaluator {
 public:
  explicit NonlocalEvaluator(const ProblemSpec& spec);

  std::size_t size() const noexcept { return weights_.size(); }
  const Matrix<real_t>& kernel() const noexcept { return *kernel_; }
  const Vec& weights() const noexcept { return weights_; }
  real_t rho() const noexcept { return rho_; }
  real_t sigma() const noexcept { return sigma_; }

  // theta_i = sum_j F[i][j] * (weights_j |w_j|^sigma)
  Vec theta(std::span<const real_t> w) const;

  // Derivative of u -> u^rho .* theta(u):
  //   rho diag(u^(rho-1) .* theta(u)) + sigma diag(u^rho) F diag(weights .* |u|^(sigma-1) sign u)
  Matrix<double> theta_jacobian(std::span<const real_t> u) const;

  // The same derivative in working precision (test and diagnostic use).
  Matrix<real_t> theta_jacobian_exact(std::span<const real_t> u) const;

  // u^rho .* theta(u)
  Vec nonlinearity(std::span<const real_t> u) const;

  // Interaction energy sum_i weights_i w_i^(rho+1) theta(w)_i; zero only for
  // w = 0 when the kernel is in class K.
  real_t energy(std::span<const real_t> w) const;

  // max_ij F[i][j]
  real_t kernel_sup() const noexcept { return kernel_sup_; }

 private:
  void check_length(std::span<const real_t> w) const;
  Vec density(std::span<const real_t> w) const;
  template <class Out>
  Matrix<Out> jacobian_impl(std::span<const real_t> u) const;

  std::shared_ptr<const Matrix<real_t>> kernel_;
  Vec weights_;
  real_t rho_;
  real_t sigma_;
  real_t kernel_sup_ = 0;
};

}  // namespace beambranch
