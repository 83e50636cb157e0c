#include "beambranch/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "beambranch/error.hpp"

namespace beambranch {

namespace {

real_t weighted_dot(std::span<const real_t> x, std::span<const real_t> y, std::span<const real_t> a) {
  real_t s = 0;
  for (std::size_t j = 0; j < x.size(); ++j) s += a[j] * x[j] * y[j];
  return s;
}

// Scale to sup-norm 1 with the largest-magnitude entry positive.
void normalize(Vec& v) {
  std::size_t arg = 0;
  for (std::size_t j = 1; j < v.size(); ++j)
    if (xp::abs(v[j]) > xp::abs(v[arg])) arg = j;
  const real_t scale = v[arg];
  if (scale == 0) throw Error(ErrorCode::NoConvergence, "iterate collapsed to zero");
  for (real_t& x : v) x /= scale;
}

void check_weight(const OperatorFactorization& op, std::span<const real_t> a) {
  if (a.size() != op.size()) throw Error(ErrorCode::DimensionMismatch, "weight length differs from operator size");
  real_t max_a = 0;
  for (real_t v : a) {
    if (!(v >= 0)) throw Error(ErrorCode::PreconditionFailed, "weight a must be nonnegative");
    max_a = std::max(max_a, v);
  }
  if (!(max_a > 0)) throw Error(ErrorCode::PreconditionFailed, "weight a vanishes identically");
}

real_t eigen_residual(const OperatorFactorization& op, std::span<const real_t> a, std::span<const real_t> phi,
                      real_t lambda) {
  Vec r = op.apply(phi);
  for (std::size_t j = 0; j < r.size(); ++j) r[j] -= lambda * a[j] * phi[j];
  return sup_norm(r);
}

Vec sine_mode(std::size_t n, std::size_t k) {
  Vec v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = xp::sin(real_t(k) * xp::pi * real_t(j + 1) / real_t(n + 1));
  return v;
}

// Power iteration on L_h^{-1} diag(a), projecting out `deflate` after
// every application.
EigenPair iterate(const OperatorFactorization& op, std::span<const real_t> a, Vec v, std::size_t index,
                  const std::vector<const EigenPair*>& deflate, const EigenOptions& options) {
  const std::size_t n = op.size();
  auto project = [&](Vec& w) {
    const real_t before = sup_norm(w);
    for (const EigenPair* q : deflate) {
      const real_t c = weighted_dot(w, q->phi, a) / weighted_dot(q->phi, q->phi, a);
      for (std::size_t j = 0; j < n; ++j) w[j] -= c * q->phi[j];
    }
    if (!(sup_norm(w) > real_t(1e-20) * before)) {
      throw Error(ErrorCode::DegenerateDeflation, "iterate lies in the span of lower modes");
    }
  };
  project(v);
  normalize(v);
  real_t lambda = rayleigh_quotient(op, v, a);
  Vec rhs(n);
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    for (std::size_t j = 0; j < n; ++j) rhs[j] = a[j] * v[j];
    Vec w = op.solve(rhs);
    project(w);
    normalize(w);
    v = std::move(w);
    const real_t next = rayleigh_quotient(op, v, a);
    const real_t change = xp::abs(next - lambda);
    lambda = next;
    const real_t residual = eigen_residual(op, a, v, lambda);
    const real_t scale = sup_norm(op.apply(v));
    if (change <= real_t(options.tol) * xp::abs(lambda) && residual <= real_t(options.residual_tol) * scale) {
      EigenPair pair;
      pair.index = index;
      pair.lambda = lambda;
      pair.nodal_count = nodal_count(v);
      pair.phi = std::move(v);
      pair.residual = residual;
      pair.iterations = it;
      return pair;
    }
  }
  throw Error(ErrorCode::NoConvergence, "eigenpair " + std::to_string(index) + " did not converge in " +
                                            std::to_string(options.max_iter) + " iterations");
}

}  // namespace

real_t EigenPair::relative_residual(const OperatorFactorization& op) const {
  return residual / sup_norm(op.apply(phi));
}

EigenPair principal_eigenpair(const OperatorFactorization& op, std::span<const real_t> a,
                              const EigenOptions& options) {
  check_weight(op, a);
  EigenPair pair = iterate(op, a, sine_mode(op.size(), 1), 1, {}, options);
  for (real_t v : pair.phi) {
    if (!(v > 0)) {
      throw Error(ErrorCode::NonPositiveEigenfunction,
                  "principal eigenfunction has a nonpositive entry (check p > -pi^2, a not vanishing, grid size)");
    }
  }
  return pair;
}

std::vector<EigenPair> higher_eigenpairs(const OperatorFactorization& op, std::span<const real_t> a,
                                         const EigenPair& principal, std::size_t count,
                                         const EigenOptions& options) {
  std::vector<EigenPair> pairs;
  if (count == 0) return pairs;
  check_weight(op, a);
  pairs.reserve(count);
  for (std::size_t k = 2; k <= count + 1; ++k) {
    std::vector<const EigenPair*> lower{&principal};
    for (const auto& q : pairs) lower.push_back(&q);
    pairs.push_back(iterate(op, a, sine_mode(op.size(), k), k, lower, options));
  }
  return pairs;
}

std::size_t nodal_count(std::span<const real_t> phi) {
  const real_t floor = real_t(1e-10) * sup_norm(phi);
  std::size_t changes = 0;
  int last = 0;
  for (real_t v : phi) {
    if (xp::abs(v) <= floor) continue;
    const int s = v > 0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

real_t rayleigh_quotient(const OperatorFactorization& op, std::span<const real_t> u, std::span<const real_t> a) {
  if (u.size() != op.size() || a.size() != op.size()) {
    throw Error(ErrorCode::DimensionMismatch, "Rayleigh quotient arguments differ in length");
  }
  const Vec lu = op.apply(u);
  const real_t h = op.h();
  real_t num = 0, den = 0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    num += h * lu[j] * u[j];
    den += h * a[j] * u[j] * u[j];
  }
  if (!(den > 0)) throw Error(ErrorCode::ZeroDenominator, "int a u^2 vanishes");
  return num / den;
}

real_t rayleigh_quotient(std::span<const real_t> u, std::span<const real_t> p, std::span<const real_t> a) {
  const std::size_t n = u.size();
  if (p.size() != n || a.size() != n) throw Error(ErrorCode::DimensionMismatch, "Rayleigh quotient arguments differ in length");
  const real_t h = real_t(1) / real_t(n + 1);
  const SecondDifference stencil(n, h);
  const Vec au = stencil.apply(u);
  const Vec aau = stencil.apply(au);
  real_t num = 0, den = 0;
  for (std::size_t j = 0; j < n; ++j) {
    num += h * (aau[j] + p[j] * au[j]) * u[j];
    den += h * a[j] * u[j] * u[j];
  }
  if (!(den > 0)) throw Error(ErrorCode::ZeroDenominator, "int a u^2 vanishes");
  return num / den;
}

HypothesisReport check_hypotheses(const ProblemSpec& spec, const HypothesisOptions& options) {
  const std::size_t n = spec.n();
  const Grid& grid = spec.grid();
  const Vec& p = spec.p().samples;
  const Vec& a = spec.a().samples;
  const auto& F = spec.f().matrix();
  const real_t pi2 = xp::pi * xp::pi;
  HypothesisReport report{};

  real_t min_p = *std::min_element(p.begin(), p.end());
  report.h1 = {min_p + pi2 > 0, to_double(min_p + pi2)};

  const std::size_t window = std::min(n, options.window ? options.window : std::max<std::size_t>(3, n / 20));
  real_t max_a = 0;
  bool nonnegative = true;
  for (real_t v : a) {
    max_a = std::max(max_a, v);
    nonnegative = nonnegative && v >= 0;
  }
  real_t min_window_max = std::numeric_limits<double>::infinity();
  for (std::size_t start = 0; start + window <= n; ++start) {
    const real_t m = *std::max_element(a.begin() + start, a.begin() + start + window);
    min_window_max = std::min(min_window_max, m);
  }
  report.h2 = {nonnegative && min_window_max > real_t(1e-12), to_double(max_a), to_double(min_window_max), window};

  // Trapezoid sums of sin^2(pi x) times p and a; exact for grid functions
  // vanishing at both ends.
  real_t int_p = 0, int_a = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const real_t s = xp::sin(xp::pi * grid.node(j));
    int_p += grid.h() * p[j] * s * s;
    int_a += grid.h() * a[j] * s * s;
  }
  const real_t lhs = pi2 * pi2 + 2 * pi2 * int_p;
  const real_t rhs = 2 * int_a;
  report.h3 = {lhs < rhs, to_double(lhs), to_double(rhs)};

  real_t min_f = F(0, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (real_t v : F.row(i)) min_f = std::min(min_f, v);
  report.k1 = {min_f >= 0, to_double(min_f)};

  const double delta = options.strip_delta;
  const auto band = static_cast<std::size_t>(std::floor(delta * static_cast<double>(n + 1) + 1e-9));
  real_t strip_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= band ? i - band : 0;
    const std::size_t hi = std::min(n - 1, i + band);
    for (std::size_t j = lo; j <= hi; ++j) strip_min = std::min(strip_min, F(i, j));
  }
  report.k2_sufficient = {strip_min >= real_t(delta), to_double(strip_min), delta};

  report.lambda1 = std::numeric_limits<double>::quiet_NaN();
  try {
    const OperatorFactorization op(spec);
    report.lambda1 = to_double(principal_eigenpair(op, a).lambda);
  } catch (const Error& e) {
    report.lambda1_error = e.what();
  }
  report.theorem_applies = report.h1.holds && report.h2.holds && report.h3.holds && report.k1.holds;
  return report;
}

}  // namespace beambranch
