#include "beambranch/nonlocal.hpp"

#include <algorithm>

#include "beambranch/error.hpp"
#include "beambranch/kernels.hpp"

namespace beambranch {

NonlocalEvaluator::NonlocalEvaluator(const ProblemSpec& spec)
    : kernel_(spec.f().samples), weights_(spec.n(), spec.grid().h()), rho_(spec.rho()), sigma_(spec.sigma()) {
  const auto& F = *kernel_;
  for (std::size_t i = 0; i < F.rows(); ++i)
    for (real_t v : F.row(i)) kernel_sup_ = std::max(kernel_sup_, v);
}

void NonlocalEvaluator::check_length(std::span<const real_t> w) const {
  if (w.size() != size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "nonlocal input has length " + std::to_string(w.size()) + ", grid has " + std::to_string(size()));
  }
}

Vec NonlocalEvaluator::density(std::span<const real_t> w) const {
  Vec g(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) g[j] = weights_[j] * xp::abs_power(w[j], sigma_);
  return g;
}

Vec NonlocalEvaluator::theta(std::span<const real_t> w) const {
  check_length(w);
  const Vec g = density(w);
  Vec out(w.size());
  kernels::omp::matvec<real_t>(*kernel_, g, out);
  return out;
}

Vec NonlocalEvaluator::nonlinearity(std::span<const real_t> u) const {
  Vec out = theta(u);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] *= xp::power(u[i], rho_);
  return out;
}

template <class Out>
Matrix<Out> NonlocalEvaluator::jacobian_impl(std::span<const real_t> u) const {
  check_length(u);
  const std::size_t n = u.size();
  if (sigma_ < 1) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!(u[j] > 0)) {
        throw Error(ErrorCode::SingularDerivative,
                    "sigma < 1 requires strictly positive u; u_" + std::to_string(j + 1) + " = " + xp::format(u[j], 17));
      }
    }
  }
  const Vec th = theta(u);
  Vec left(n), right(n);
  for (std::size_t i = 0; i < n; ++i) {
    left[i] = xp::power(u[i], rho_);
    right[i] = weights_[i] * xp::abs_power_derivative(u[i], sigma_);
  }
  Matrix<Out> d(n, n);
  kernels::omp::scale_rows_cols<real_t, Out>(*kernel_, left, right, d);
  for (std::size_t i = 0; i < n; ++i) d(i, i) += static_cast<Out>(xp::power_derivative(u[i], rho_) * th[i]);
  return d;
}

Matrix<double> NonlocalEvaluator::theta_jacobian(std::span<const real_t> u) const { return jacobian_impl<double>(u); }

Matrix<real_t> NonlocalEvaluator::theta_jacobian_exact(std::span<const real_t> u) const {
  return jacobian_impl<real_t>(u);
}

real_t NonlocalEvaluator::energy(std::span<const real_t> w) const {
  const Vec th = theta(w);
  real_t sum = 0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += weights_[i] * xp::power(w[i], rho_ + 1) * th[i];
  return sum;
}

}  // namespace beambranch
