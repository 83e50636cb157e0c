#include "beambranch/problem.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "beambranch/error.hpp"

namespace beambranch {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedConfig: return "MalformedConfig";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::NegativeData: return "NegativeData";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::Io: return "Io";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularOperator: return "SingularOperator";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonPositiveEigenfunction: return "NonPositiveEigenfunction";
    case ErrorCode::DegenerateDeflation: return "DegenerateDeflation";
    case ErrorCode::SingularDerivative: return "SingularDerivative";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::PositivityLost: return "PositivityLost";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
  }
  return "Unknown";
}

namespace xp {

namespace {

std::optional<long> small_integer(real_t e) {
  if (e >= 0 && e <= 8 && floorq(e) == e) return static_cast<long>(e);
  return std::nullopt;
}

}  // namespace

real_t power(real_t x, real_t e) {
  if (auto k = small_integer(e)) {
    real_t r = 1;
    for (long i = 0; i < *k; ++i) r *= x;
    return r;
  }
  if (x < 0) return -powq(-x, e);
  return powq(x, e);
}

real_t power_derivative(real_t x, real_t e) {
  if (e == 0) return 0;
  if (small_integer(e)) return e * power(x, e - 1);
  return e * powq(fabsq(x), e - 1);
}

real_t abs_power(real_t x, real_t e) { return power(fabsq(x), e); }

real_t abs_power_derivative(real_t x, real_t e) {
  if (x == 0) return e == 1 ? real_t(0) : (e > 1 ? real_t(0) : real_t(HUGE_VALQ));
  const real_t s = x > 0 ? real_t(1) : real_t(-1);
  return s * e * power(fabsq(x), e - 1);
}

real_t parse(const std::string& text) {
  char* end = nullptr;
  const real_t v = strtoflt128(text.c_str(), &end);
  if (end == text.c_str()) throw Error(ErrorCode::MalformedConfig, "not a number: '" + text + "'");
  while (*end == ' ' || *end == '\t') ++end;
  if (*end != '\0') throw Error(ErrorCode::MalformedConfig, "trailing characters in number: '" + text + "'");
  return v;
}

std::string format(real_t x, int digits) {
  char buf[64];
  quadmath_snprintf(buf, sizeof buf, "%.*Qg", digits, x);
  return buf;
}

}  // namespace xp

std::vector<double> to_double(std::span<const real_t> v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](real_t x) { return static_cast<double>(x); });
  return out;
}

Vec to_real(std::span<const double> v) { return Vec(v.begin(), v.end()); }

real_t sup_norm(std::span<const real_t> v) {
  real_t m = 0;
  for (real_t x : v) m = std::max(m, xp::abs(x));
  return m;
}

real_t min_value(std::span<const real_t> v) {
  if (v.empty()) return 0;
  return *std::min_element(v.begin(), v.end());
}

Grid::Grid(std::size_t n) : n_(n), h_(real_t(1) / real_t(n + 1)), nodes_(n) {
  if (n < min_nodes) {
    throw Error(ErrorCode::MalformedConfig, "grid needs at least 3 interior nodes, got " + std::to_string(n));
  }
  // j/(n+1) rather than j*h so shared nodes of refined grids agree bitwise.
  for (std::size_t j = 0; j < n; ++j) nodes_[j] = real_t(j + 1) / real_t(n + 1);
}

namespace {

void require_arity(const FieldSource& s, std::size_t count) {
  if (s.params.size() != count) {
    throw Error(ErrorCode::MalformedConfig, "kind '" + s.kind + "' takes " + std::to_string(count) +
                                                " parameter(s), got " + std::to_string(s.params.size()));
  }
}

FieldKind field_kind(const std::string& kind) {
  if (kind == "constant") return FieldKind::Constant;
  if (kind == "affine") return FieldKind::Affine;
  if (kind == "cosine") return FieldKind::Cosine;
  if (kind == "tabulated") return FieldKind::Tabulated;
  throw Error(ErrorCode::MalformedConfig, "unknown coefficient kind '" + kind + "'");
}

KernelKind kernel_kind(const std::string& kind) {
  if (kind == "constant") return KernelKind::Constant;
  if (kind == "expdecay") return KernelKind::ExpDecay;
  if (kind == "gaussian") return KernelKind::Gaussian;
  if (kind == "tabulated") return KernelKind::Tabulated;
  throw Error(ErrorCode::MalformedConfig, "unknown kernel kind '" + kind + "'");
}

}  // namespace

Vec sample_function(const FieldSource& source, const Grid& grid) {
  const std::size_t n = grid.n();
  Vec out(n);
  switch (field_kind(source.kind)) {
    case FieldKind::Constant:
      require_arity(source, 1);
      std::fill(out.begin(), out.end(), source.params[0]);
      break;
    case FieldKind::Affine:
      require_arity(source, 2);
      for (std::size_t j = 0; j < n; ++j) out[j] = source.params[0] + source.params[1] * grid.node(j);
      break;
    case FieldKind::Cosine:
      require_arity(source, 3);
      for (std::size_t j = 0; j < n; ++j) {
        out[j] = source.params[0] + source.params[1] * xp::cos(source.params[2] * xp::pi * grid.node(j));
      }
      break;
    case FieldKind::Tabulated:
      if (source.params.size() != n) {
        throw Error(ErrorCode::ArityMismatch, "tabulated field has " + std::to_string(source.params.size()) +
                                                  " values, grid has " + std::to_string(n) + " nodes");
      }
      out = source.params;
      break;
  }
  return out;
}

CoefficientField sample_coefficient(const FieldSource& source, const Grid& grid) {
  const FieldKind kind = field_kind(source.kind);
  CoefficientField field{kind, kind == FieldKind::Tabulated ? std::vector<real_t>{} : source.params,
                         sample_function(source, grid)};
  return field;
}

KernelField sample_kernel(const FieldSource& source, const Grid& grid) {
  const std::size_t n = grid.n();
  const KernelKind kind = kernel_kind(source.kind);
  auto m = std::make_shared<Matrix<real_t>>(n, n);
  auto fill = [&](auto&& f) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) (*m)(i, j) = f(grid.node(i), grid.node(j));
  };
  switch (kind) {
    case KernelKind::Constant:
      require_arity(source, 1);
      fill([c = source.params[0]](real_t, real_t) { return c; });
      break;
    case KernelKind::ExpDecay:
      require_arity(source, 2);
      fill([c = source.params[0], alpha = source.params[1]](real_t x, real_t y) {
        return c * xp::exp(-alpha * xp::abs(x - y));
      });
      break;
    case KernelKind::Gaussian:
      require_arity(source, 2);
      fill([c = source.params[0], alpha = source.params[1]](real_t x, real_t y) {
        const real_t d = x - y;
        return c * xp::exp(-alpha * d * d);
      });
      break;
    case KernelKind::Tabulated:
      if (source.params.size() != n * n) {
        throw Error(ErrorCode::ArityMismatch, "tabulated kernel has " + std::to_string(source.params.size()) +
                                                  " values, expected " + std::to_string(n * n));
      }
      std::copy(source.params.begin(), source.params.end(), m->data());
      break;
  }
  return KernelField{kind, kind == KernelKind::Tabulated ? std::vector<real_t>{} : source.params, std::move(m)};
}

ProblemSpec::ProblemSpec(Grid grid, CoefficientField p, CoefficientField a, KernelField f, real_t rho, real_t sigma)
    : grid_(std::move(grid)), p_(std::move(p)), a_(std::move(a)), f_(std::move(f)), rho_(rho), sigma_(sigma) {
  const std::size_t n = grid_.n();
  if (!(rho_ >= 1)) throw Error(ErrorCode::InvalidExponent, "rho must be >= 1, got " + xp::format(rho_, 17));
  if (!(sigma_ > 0)) throw Error(ErrorCode::InvalidExponent, "sigma must be > 0, got " + xp::format(sigma_, 17));
  if (p_.samples.size() != n || a_.samples.size() != n || !f_.samples || f_.samples->rows() != n ||
      f_.samples->cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "field samples do not match the grid");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!(a_.samples[j] >= 0)) {
      throw Error(ErrorCode::NegativeData, "a is negative at x = " + xp::format(grid_.node(j), 17));
    }
  }
  const auto& F = *f_.samples;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!(F(i, j) >= 0)) {
        throw Error(ErrorCode::NegativeData, "kernel f is negative at (" + xp::format(grid_.node(i), 17) + ", " +
                                                 xp::format(grid_.node(j), 17) + ")");
      }
}

ProblemSpec build_problem(const ProblemConfig& config, std::size_t n) {
  if (!config.a) throw Error(ErrorCode::MalformedConfig, "missing required key 'a'");
  if (!config.f) throw Error(ErrorCode::MalformedConfig, "missing required key 'f'");
  const real_t rho = config.rho.value_or(1);
  const real_t sigma = config.sigma.value_or(2);
  if (!(rho >= 1)) throw Error(ErrorCode::InvalidExponent, "rho must be >= 1");
  if (!(sigma > 0)) throw Error(ErrorCode::InvalidExponent, "sigma must be > 0");
  Grid grid(n);
  const FieldSource p_source = config.p.value_or(FieldSource{"constant", {0}});
  auto p = sample_coefficient(p_source, grid);
  auto a = sample_coefficient(*config.a, grid);
  auto f = sample_kernel(*config.f, grid);
  return ProblemSpec(std::move(grid), std::move(p), std::move(a), std::move(f), rho, sigma);
}

std::vector<std::string> problem_notes(const ProblemSpec& spec) {
  std::vector<std::string> notes;
  if (spec.rho() == 1) {
    notes.emplace_back(
        "rho = 1: the nonlinearity is superlinear only through sigma + rho > 1; bifurcation from the trivial "
        "line still applies");
  }
  return notes;
}

}  // namespace beambranch
