#include "beambranch/continuation.hpp"

#include <algorithm>
#include <cmath>

#include "beambranch/error.hpp"
#include "beambranch/kernels.hpp"

namespace beambranch {

namespace {

void check_length(const Discretization& d, std::span<const real_t> u) {
  if (u.size() != d.n()) {
    throw Error(ErrorCode::DimensionMismatch,
                "state has length " + std::to_string(u.size()) + ", grid has " + std::to_string(d.n()));
  }
}

bool positivity_floor_active(const Discretization& d) { return d.spec.sigma() < 1; }

// Weighted inner product on (u, lambda): weight 1 on lambda, 1/n on each u entry.
real_t weighted_dot(std::span<const real_t> du, real_t dl, std::span<const real_t> eu, real_t el) {
  real_t s = 0;
  for (std::size_t j = 0; j < du.size(); ++j) s += du[j] * eu[j];
  return dl * el + s / real_t(du.size());
}

}  // namespace

std::string_view to_string(BranchStatus status) {
  switch (status) {
    case BranchStatus::CrossedLambda1: return "crossed_lambda_1";
    case BranchStatus::ReachedLambdaMax: return "reached_lambda_max";
    case BranchStatus::ReachedMaxSteps: return "reached_max_steps";
    case BranchStatus::FailedPositivity: return "failed_positivity";
    case BranchStatus::NewtonFailure: return "newton_failure";
  }
  return "unknown";
}

Vec residual(const Discretization& d, real_t lambda, std::span<const real_t> u) {
  check_length(d, u);
  Vec r = d.op.apply(u);
  const Vec g = d.nonlocal.nonlinearity(u);
  const Vec& a = d.spec.a().samples;
  for (std::size_t j = 0; j < r.size(); ++j) r[j] += lambda * (g[j] - a[j] * u[j]);
  return r;
}

Vec lambda_derivative(const Discretization& d, std::span<const real_t> u) {
  check_length(d, u);
  Vec g = d.nonlocal.nonlinearity(u);
  const Vec& a = d.spec.a().samples;
  for (std::size_t j = 0; j < g.size(); ++j) g[j] -= a[j] * u[j];
  return g;
}

real_t LinearConstraint::value(real_t lambda, std::span<const real_t> u) const {
  real_t s = row_lambda * lambda;
  for (std::size_t j = 0; j < u.size(); ++j) s += row_u[j] * u[j];
  return s - rhs;
}

Matrix<double> newton_jacobian(const Discretization& d, real_t lambda, std::span<const real_t> u,
                               const std::optional<LinearConstraint>& constraint) {
  check_length(d, u);
  const std::size_t n = d.n();
  const std::size_t m = constraint ? n + 1 : n;
  const Matrix<double> D = d.nonlocal.theta_jacobian(u);
  const Matrix<double>& L = d.op.matrix();
  const Vec& a = d.spec.a().samples;
  const double lam = to_double(lambda);
  Matrix<double> J(m, m);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto l_row = L.row(i);
    const auto d_row = D.row(i);
    auto j_row = J.row(i);
    for (std::size_t j = 0; j < n; ++j) j_row[j] = l_row[j] + lam * d_row[j];
    j_row[i] -= to_double(lambda * a[i]);
  }
  if (constraint) {
    const Vec dl = lambda_derivative(d, u);
    for (std::size_t i = 0; i < n; ++i) J(i, n) = to_double(dl[i]);
    for (std::size_t j = 0; j < n; ++j) J(n, j) = to_double(constraint->row_u[j]);
    J(n, n) = to_double(constraint->row_lambda);
  }
  return J;
}

NewtonResult newton_correct(const Discretization& d, real_t lambda, Vec u,
                            const std::optional<LinearConstraint>& constraint, const NewtonOptions& options) {
  check_length(d, u);
  const std::size_t n = d.n();
  if (constraint && constraint->row_u.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "constraint row length differs from grid");
  }
  if (constraint && constraint->row_lambda == 0 &&
      std::all_of(constraint->row_u.begin(), constraint->row_u.end(), [](real_t v) { return v == 0; })) {
    throw Error(ErrorCode::NewtonDiverged, "degenerate constraint: zero tangent row");
  }
  const real_t tol = options.tol;
  std::vector<double> step(constraint ? n + 1 : n);
  kernels::Pivots pivots;
  for (std::size_t it = 0;; ++it) {
    if (positivity_floor_active(d) && !(min_value(u) > 0)) {
      throw Error(ErrorCode::PositivityLost, "iterate lost strict positivity (sigma < 1) at Newton iteration " +
                                                 std::to_string(it));
    }
    const Vec r = residual(d, lambda, u);
    const real_t rnorm = sup_norm(r);
    const real_t cval = constraint ? constraint->value(lambda, u) : real_t(0);
    if (!xp::isfinite(rnorm) || !xp::isfinite(cval)) {
      throw Error(ErrorCode::NewtonDiverged, "non-finite residual at Newton iteration " + std::to_string(it));
    }
    if (rnorm <= tol && xp::abs(cval) <= tol) return {lambda, std::move(u), it, rnorm};
    if (it == options.max_iter) {
      throw Error(ErrorCode::NewtonDiverged, "no convergence in " + std::to_string(options.max_iter) +
                                                 " iterations (residual " + xp::format(rnorm, 6) + ")");
    }
    Matrix<double> J = newton_jacobian(d, lambda, u, constraint);
    try {
      factor_or_throw(J, pivots, "Newton Jacobian");
    } catch (const Error& e) {
      throw Error(ErrorCode::NewtonDiverged, std::string(e.what()) + " (degenerate constraint or singular point)");
    }
    for (std::size_t j = 0; j < n; ++j) step[j] = to_double(r[j]);
    if (constraint) step[n] = to_double(cval);
    kernels::lu_solve(J, pivots, step);
    real_t step_norm = 0;
    for (std::size_t j = 0; j < n; ++j) {
      u[j] -= step[j];
      step_norm = std::max(step_norm, xp::abs(real_t(step[j])));
    }
    if (constraint) {
      lambda -= step[n];
      step_norm = std::max(step_norm, xp::abs(real_t(step[n])));
    }
    if (!xp::isfinite(step_norm) || step_norm > real_t(1e8) * (1 + sup_norm(u) + xp::abs(lambda))) {
      throw Error(ErrorCode::NewtonDiverged, "Newton step blew up at iteration " + std::to_string(it));
    }
  }
}

BranchPoint make_branch_point(const Discretization& d, real_t lambda, Vec u, real_t arclength,
                              std::size_t iterations) {
  BranchPoint pt;
  pt.lambda = lambda;
  pt.sup_norm = sup_norm(u);
  pt.min_value = min_value(u);
  pt.residual_norm = sup_norm(residual(d, lambda, u));
  pt.arclength = arclength;
  pt.newton_iterations = iterations;
  pt.u = std::move(u);
  return pt;
}

BranchPoint branch_start(const Discretization& d, const EigenPair& principal, double epsilon,
                         const NewtonOptions& options) {
  const std::size_t n = d.n();
  if (principal.phi.size() != n) throw Error(ErrorCode::DimensionMismatch, "eigenfunction length differs from grid");
  if (!(epsilon > 0)) {
    throw Error(ErrorCode::NewtonDiverged, "pinning amplitude must be positive; epsilon = 0 pins the trivial solution");
  }
  const real_t h = d.spec.grid().h();
  LinearConstraint pin;
  pin.row_u.resize(n);
  real_t phi_norm2 = 0;
  for (std::size_t j = 0; j < n; ++j) {
    pin.row_u[j] = h * principal.phi[j];
    phi_norm2 += h * principal.phi[j] * principal.phi[j];
  }
  pin.rhs = real_t(epsilon) * phi_norm2;
  Vec guess(n);
  for (std::size_t j = 0; j < n; ++j) guess[j] = real_t(epsilon) * principal.phi[j];
  NewtonResult res = newton_correct(d, principal.lambda, std::move(guess), pin, options);
  if (!(min_value(res.u) > 0)) {
    throw Error(ErrorCode::PositivityLost, "first branch point is not strictly positive");
  }
  return make_branch_point(d, res.lambda, std::move(res.u), 0, res.iterations);
}

Branch trace_branch(const Discretization& d, const EigenPair& principal, const BranchOptions& options) {
  const std::size_t n = d.n();
  const NewtonOptions newton{options.newton_tol, options.newton_max_iter};
  Branch branch;
  branch.start_lambda = principal.lambda;

  auto finish = [&](BranchStatus why) {
    branch.termination = why;
    // A recorded lambda = 1 witness outranks however stepping ended.
    branch.status = branch.crossing ? BranchStatus::CrossedLambda1 : why;
    return branch;
  };

  try {
    branch.points.push_back(branch_start(d, principal, options.epsilon, newton));
  } catch (const Error& e) {
    branch.notes.emplace_back(std::string("branch start failed: ") + e.what());
    return finish(e.code() == ErrorCode::PositivityLost ? BranchStatus::FailedPositivity
                                                        : BranchStatus::NewtonFailure);
  }

  // Secant history: the bifurcation point (lambda_1, 0) precedes the first point.
  real_t prev_lambda = principal.lambda;
  Vec prev_u(n, real_t(0));
  BranchPoint cur = branch.points.front();
  if (cur.lambda >= real_t(options.lambda_max)) return finish(BranchStatus::ReachedLambdaMax);

  const double max_ds = options.ds * options.max_ds_factor;
  double ds = options.ds;
  std::size_t easy = 0;
  int last_sign = 0;
  Vec tangent_u(n), predicted(n);

  while (branch.steps < options.max_steps) {
    real_t tangent_l = cur.lambda - prev_lambda;
    for (std::size_t j = 0; j < n; ++j) tangent_u[j] = cur.u[j] - prev_u[j];
    const real_t tnorm = xp::sqrt(weighted_dot(tangent_u, tangent_l, tangent_u, tangent_l));
    if (!(tnorm > 0)) {
      branch.notes.emplace_back("secant tangent vanished");
      return finish(BranchStatus::NewtonFailure);
    }
    tangent_l /= tnorm;
    for (real_t& t : tangent_u) t /= tnorm;

    LinearConstraint plane;
    plane.row_u.resize(n);
    for (std::size_t j = 0; j < n; ++j) plane.row_u[j] = tangent_u[j] / real_t(n);
    plane.row_lambda = tangent_l;
    plane.rhs = weighted_dot(tangent_u, tangent_l, cur.u, cur.lambda) + real_t(ds);

    for (std::size_t j = 0; j < n; ++j) predicted[j] = cur.u[j] + real_t(ds) * tangent_u[j];
    const real_t predicted_l = cur.lambda + real_t(ds) * tangent_l;

    std::optional<NewtonResult> res;
    bool positivity_failure = false;
    try {
      res = newton_correct(d, predicted_l, predicted, plane, newton);
      if (!(min_value(res->u) > 0) || !(res->lambda >= 0)) {
        positivity_failure = true;
        res.reset();
      }
    } catch (const Error& e) {
      positivity_failure = e.code() == ErrorCode::PositivityLost;
    }
    if (!res) {
      ds *= 0.5;
      easy = 0;
      if (ds < options.min_ds) {
        branch.notes.emplace_back("step size fell below minimum at lambda = " + xp::format(cur.lambda, 17));
        return finish(positivity_failure ? BranchStatus::FailedPositivity : BranchStatus::NewtonFailure);
      }
      continue;
    }

    BranchPoint next = make_branch_point(d, res->lambda, std::move(res->u), cur.arclength + real_t(ds), res->iterations);
    ++branch.steps;

    const real_t dl = next.lambda - cur.lambda;
    const int sign = dl > 0 ? 1 : (dl < 0 ? -1 : 0);
    if (sign < 0) branch.lambda_monotone = false;
    if (sign != 0) {
      if (last_sign != 0 && sign != last_sign) {
        ++branch.direction_reversals;
        branch.notes.emplace_back("direction reversal (fold) near lambda = " + xp::format(cur.lambda, 17));
      }
      last_sign = sign;
    }

    // lambda = 1 bracket: correct at fixed lambda from the interpolant.
    if (!branch.crossing && (cur.lambda - 1) * (next.lambda - 1) <= 0 && next.lambda != cur.lambda) {
      const real_t t = (1 - cur.lambda) / (next.lambda - cur.lambda);
      if (t <= 0) {
        branch.crossing = branch.points.size() - 1;
      } else if (t < 1) {
        Vec guess(n);
        for (std::size_t j = 0; j < n; ++j) guess[j] = cur.u[j] + t * (next.u[j] - cur.u[j]);
        try {
          NewtonResult fixed = newton_correct(d, real_t(1), std::move(guess), std::nullopt, newton);
          if (min_value(fixed.u) > 0) {
            branch.points.push_back(make_branch_point(d, real_t(1), std::move(fixed.u),
                                                      cur.arclength + t * real_t(ds), fixed.iterations));
            branch.crossing = branch.points.size() - 1;
          } else {
            branch.notes.emplace_back("lambda = 1 correction produced a non-positive profile");
          }
        } catch (const Error& e) {
          branch.notes.emplace_back(std::string("lambda = 1 correction failed: ") + e.what());
        }
      } else {
        branch.crossing = branch.points.size();
      }
    }

    prev_lambda = cur.lambda;
    prev_u = cur.u;
    branch.points.push_back(next);
    cur = std::move(next);

    if (cur.newton_iterations <= options.easy_iterations) {
      if (++easy >= 2) {
        ds = std::min(ds * options.grow, max_ds);
        easy = 0;
      }
    } else {
      easy = 0;
    }
    if (cur.lambda >= real_t(options.lambda_max)) return finish(BranchStatus::ReachedLambdaMax);
  }
  return finish(BranchStatus::ReachedMaxSteps);
}

BranchPoint solve_at_lambda(const Discretization& d, const Branch& branch, real_t lambda_target,
                            const BranchOptions& options) {
  const auto& pts = branch.points;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const real_t l0 = pts[i].lambda, l1 = pts[i + 1].lambda;
    if ((l0 - lambda_target) * (l1 - lambda_target) > 0 || l0 == l1) continue;
    const real_t t = (lambda_target - l0) / (l1 - l0);
    Vec guess(d.n());
    for (std::size_t j = 0; j < guess.size(); ++j) guess[j] = pts[i].u[j] + t * (pts[i + 1].u[j] - pts[i].u[j]);
    BranchPoint pt = solve_at_lambda(d, lambda_target, std::move(guess),
                                     NewtonOptions{options.newton_tol, options.newton_max_iter});
    pt.arclength = pts[i].arclength + t * (pts[i + 1].arclength - pts[i].arclength);
    if (pt.sup_norm < real_t(10 * options.epsilon)) {
      throw Error(ErrorCode::NoBracket, "solution at lambda = " + xp::format(lambda_target, 17) +
                                            " is within the trivial-adjacent amplitude floor 10*epsilon");
    }
    return pt;
  }
  throw Error(ErrorCode::NoBracket, "no pair of branch points brackets lambda = " + xp::format(lambda_target, 17));
}

BranchPoint solve_at_lambda(const Discretization& d, real_t lambda_target, Vec initial_guess,
                            const NewtonOptions& options) {
  NewtonResult res = newton_correct(d, lambda_target, std::move(initial_guess), std::nullopt, options);
  if (!(min_value(res.u) > 0)) {
    throw Error(ErrorCode::PositivityLost, "solution at lambda = " + xp::format(lambda_target, 17) +
                                               " is not strictly positive");
  }
  return make_branch_point(d, lambda_target, std::move(res.u), 0, res.iterations);
}

}  // namespace beambranch
