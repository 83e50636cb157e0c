#pragma once

#include <quadmath.h>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace beambranch {

// Working scalar for grid functions, samples and residuals. The hinged
// fourth-difference stencil scales like h^-4, so double-rounded grid
// functions carry a residual floor of ~1e-6 at n = 199; binary128 pushes
// that floor below 1e-20. Dense factorizations stay in double.
using real_t = __float128;
using Vec = std::vector<real_t>;

namespace xp {

inline constexpr real_t pi = M_PIq;
inline constexpr real_t epsilon = FLT128_EPSILON;

inline real_t abs(real_t x) { return fabsq(x); }
inline real_t sqrt(real_t x) { return sqrtq(x); }
inline real_t sin(real_t x) { return sinq(x); }
inline real_t cos(real_t x) { return cosq(x); }
inline real_t exp(real_t x) { return expq(x); }
inline bool isfinite(real_t x) { return finiteq(x) != 0; }

// x^e. Small integer exponents use repeated multiplication so that scaling
// x by a power of two scales the result exactly. Negative bases with a
// non-integer exponent use the odd extension sign(x)|x|^e.
real_t power(real_t x, real_t e);

// d/dx of power(x, e).
real_t power_derivative(real_t x, real_t e);

// |x|^e, and its derivative e|x|^(e-1)sign(x).
real_t abs_power(real_t x, real_t e);
real_t abs_power_derivative(real_t x, real_t e);

real_t parse(const std::string& text);
std::string format(real_t x, int digits = 36);

}  // namespace xp

inline double to_double(real_t x) { return static_cast<double>(x); }

std::vector<double> to_double(std::span<const real_t> v);
Vec to_real(std::span<const double> v);

real_t sup_norm(std::span<const real_t> v);
real_t min_value(std::span<const real_t> v);

}  // namespace beambranch
