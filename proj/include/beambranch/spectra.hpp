#pragma once

// Weighted eigenproblem L_h phi = lambda a phi, Rayleigh quotients, and the
// solvability hypotheses for the nonlocal problem:
//   H1  p(x) > -pi^2
//   H2  a >= 0 and a not identically zero on any subinterval
//   H3  pi^4 + 2 pi^2 int p sin^2(pi x) < 2 int a sin^2(pi x)
//   K   f >= 0 and nondegenerate interaction energy

#include <cstddef>
#include <span>
#include <vector>

#include "beambranch/operators.hpp"
#include "beambranch/precision.hpp"
#include "beambranch/problem.hpp"

namespace beambranch {

struct EigenPair {
  std::size_t index = 0;  // 1-based
  real_t lambda = 0;
  Vec phi;  // sup-norm 1, largest-magnitude entry positive
  std::size_t nodal_count = 0;
  real_t residual = 0;  // ||L_h phi - lambda a phi||_inf
  std::size_t iterations = 0;

  real_t relative_residual(const OperatorFactorization& op) const;
};

struct EigenOptions {
  double tol = 1e-13;            // relative change of successive Rayleigh estimates
  double residual_tol = 1e-10;   // relative eigen-residual required on exit
  std::size_t max_iter = 2000;
};

// Power iteration on v -> L_h^{-1}(a v) from sin(pi x).
EigenPair principal_eigenpair(const OperatorFactorization& op, std::span<const real_t> a,
                              const EigenOptions& options = {});

// Modes 2..count+1 by the same iteration with deflation in the a-weighted
// inner product. Exact for constant p; diagnostic only otherwise.
std::vector<EigenPair> higher_eigenpairs(const OperatorFactorization& op, std::span<const real_t> a,
                                         const EigenPair& principal, std::size_t count,
                                         const EigenOptions& options = {});

// Strict sign changes between consecutive nodes, ignoring entries below
// 1e-10 ||phi||_inf.
std::size_t nodal_count(std::span<const real_t> phi);

// <L_h u, u>_h / <a u, u>_h, the discrete form of
// int (u''^2 - p u'' u) / int a u^2.
real_t rayleigh_quotient(const OperatorFactorization& op, std::span<const real_t> u, std::span<const real_t> a);

// Stand-alone form that assembles nothing: h, p and a are read off the
// arguments and L_h u is evaluated through the stencil.
real_t rayleigh_quotient(std::span<const real_t> u, std::span<const real_t> p, std::span<const real_t> a);

struct HypothesisOptions {
  std::size_t window = 0;     // 0: max(3, n/20)
  double strip_delta = 0.05;
};

struct HypothesisReport {
  struct H1 {
    bool holds;
    double min_p_plus_pi2;
  } h1;
  struct H2 {
    bool holds;
    double max_a;
    double min_window_max;
    std::size_t window;
  } h2;
  struct H3 {
    bool holds;
    double lhs;
    double rhs;
  } h3;
  struct K1 {
    bool holds;
    double min_f;
  } k1;
  struct K2 {
    bool holds;
    double strip_min;
    double strip_delta;
  } k2_sufficient;
  double lambda1;  // NaN when the eigensolve failed
  std::string lambda1_error;
  bool theorem_applies;
};

HypothesisReport check_hypotheses(const ProblemSpec& spec, const HypothesisOptions& options = {});

}  // namespace beambranch
