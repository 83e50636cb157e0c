#pragma once

// Positive solution branch of
//
//   F(lambda, u) = L_h u - lambda a .* u + lambda u^rho .* theta(u) = 0,
//
// traced by pseudo-arclength continuation from the bifurcation point
// (lambda_1, 0). At lambda = 1 the equation is the discrete nonlocal beam
// problem itself.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beambranch/nonlocal.hpp"
#include "beambranch/operators.hpp"
#include "beambranch/problem.hpp"
#include "beambranch/spectra.hpp"

namespace beambranch {

// Everything the residual needs, built once per instance.
struct Discretization {
  explicit Discretization(ProblemSpec problem) : spec(std::move(problem)), op(spec), nonlocal(spec) {}

  ProblemSpec spec;
  OperatorFactorization op;
  NonlocalEvaluator nonlocal;

  std::size_t n() const noexcept { return spec.n(); }
};

Vec residual(const Discretization& d, real_t lambda, std::span<const real_t> u);

// dF/dlambda = -a .* u + u^rho .* theta(u)
Vec lambda_derivative(const Discretization& d, std::span<const real_t> u);

// Linear side condition <row_u, u> + row_lambda * lambda = rhs appended to
// F = 0. Used for amplitude pinning and for the arclength plane.
struct LinearConstraint {
  Vec row_u;
  real_t row_lambda = 0;
  real_t rhs = 0;

  real_t value(real_t lambda, std::span<const real_t> u) const;
};

// dF/du = L_h - lambda diag(a) + lambda D(u), bordered by dF/dlambda and the
// constraint row when a constraint is given.
Matrix<double> newton_jacobian(const Discretization& d, real_t lambda, std::span<const real_t> u,
                               const std::optional<LinearConstraint>& constraint);

struct NewtonOptions {
  double tol = 1e-10;
  std::size_t max_iter = 30;
};

struct NewtonResult {
  real_t lambda = 0;
  Vec u;
  std::size_t iterations = 0;
  real_t residual_norm = 0;
};

// Newton on [F; constraint] with lambda free, or on F alone at fixed lambda
// when no constraint is given.
NewtonResult newton_correct(const Discretization& d, real_t lambda, Vec u0,
                            const std::optional<LinearConstraint>& constraint, const NewtonOptions& options = {});

struct BranchPoint {
  real_t lambda = 0;
  Vec u;
  real_t sup_norm = 0;
  real_t min_value = 0;
  real_t residual_norm = 0;
  real_t arclength = 0;
  std::size_t newton_iterations = 0;
};

BranchPoint make_branch_point(const Discretization& d, real_t lambda, Vec u, real_t arclength,
                              std::size_t iterations = 0);

// First nontrivial point: pins <phi_1, u>_h = epsilon <phi_1, phi_1>_h with
// lambda free, starting from (lambda_1, epsilon phi_1).
BranchPoint branch_start(const Discretization& d, const EigenPair& principal, double epsilon,
                         const NewtonOptions& options = {});

enum class BranchStatus { CrossedLambda1, ReachedLambdaMax, ReachedMaxSteps, FailedPositivity, NewtonFailure };

std::string_view to_string(BranchStatus status);

struct BranchOptions {
  double ds = 0.05;
  std::size_t max_steps = 400;
  double lambda_max = 2.0;
  double newton_tol = 1e-10;
  std::size_t newton_max_iter = 30;
  double epsilon = 1e-2;
  double min_ds = 1e-6;
  double max_ds_factor = 10.0;
  double grow = 1.3;
  std::size_t easy_iterations = 4;
};

struct Branch {
  std::vector<BranchPoint> points;
  real_t start_lambda = 0;  // lambda_1 of the principal pair
  BranchStatus status = BranchStatus::ReachedMaxSteps;
  BranchStatus termination = BranchStatus::ReachedMaxSteps;  // why stepping stopped
  std::optional<std::size_t> crossing;                          // index of the lambda = 1 point
  std::size_t steps = 0;                                         // accepted continuation steps
  std::size_t direction_reversals = 0;                          // sign changes of delta lambda
  bool lambda_monotone = true;
  std::vector<std::string> notes;
};

Branch trace_branch(const Discretization& d, const EigenPair& principal, const BranchOptions& options = {});

// Fixed-lambda solve from the linear interpolant of the first pair of branch
// points bracketing lambda_target.
BranchPoint solve_at_lambda(const Discretization& d, const Branch& branch, real_t lambda_target,
                            const BranchOptions& options = {});

// Fixed-lambda solve from an explicit initial guess.
BranchPoint solve_at_lambda(const Discretization& d, real_t lambda_target, Vec initial_guess,
                            const NewtonOptions& options = {});

}  // namespace beambranch
