#pragma once

// Problem instance: uniform grid on (0,1), coefficient fields p and a,
// interaction kernel f, and the exponents rho, sigma of
//
//   u'''' - p(x) u'' - a(x) u + u^rho(x) * int_0^1 f(x,y) |u(y)|^sigma dy = 0,
//   u(0) = u(1) = u''(0) = u''(1) = 0.

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "beambranch/matrix.hpp"
#include "beambranch/precision.hpp"

namespace beambranch {

// n interior nodes x_j = j/(n+1), j = 1..n. Boundary nodes are implicit
// zeros and never stored.
class Grid {
 public:
  static constexpr std::size_t min_nodes = 3;

  explicit Grid(std::size_t n);

  std::size_t n() const noexcept { return n_; }
  real_t h() const noexcept { return h_; }
  const Vec& nodes() const noexcept { return nodes_; }
  real_t node(std::size_t j) const { return nodes_[j]; }

 private:
  std::size_t n_;
  real_t h_;
  Vec nodes_;
};

enum class FieldKind { Constant, Affine, Cosine, Tabulated };
enum class KernelKind { Constant, ExpDecay, Gaussian, Tabulated };

// `kind:params` as written in a config file; tabulated data already loaded.
struct FieldSource {
  std::string kind;
  std::vector<real_t> params;
};

struct CoefficientField {
  FieldKind kind;
  std::vector<real_t> params;  // empty for tabulated
  Vec samples;
};

struct KernelField {
  KernelKind kind;
  std::vector<real_t> params;  // empty for tabulated
  std::shared_ptr<const Matrix<real_t>> samples;

  const Matrix<real_t>& matrix() const { return *samples; }
};

// Pointwise sampling of a coefficient description:
//   constant v        -> v
//   affine v0,v1      -> v0 + v1 x
//   cosine c0,c1,k    -> c0 + c1 cos(k pi x)
//   tabulated values  -> values (length must equal n)
Vec sample_function(const FieldSource& source, const Grid& grid);
CoefficientField sample_coefficient(const FieldSource& source, const Grid& grid);

//   constant c        -> c
//   expdecay c,alpha  -> c exp(-alpha |x-y|)
//   gaussian c,alpha  -> c exp(-alpha (x-y)^2)
//   tabulated values  -> n*n row-major values, F[i][j] = f(x_i, y_j)
KernelField sample_kernel(const FieldSource& source, const Grid& grid);

// Immutable, validated instance. Copies share the kernel samples.
class ProblemSpec {
 public:
  ProblemSpec(Grid grid, CoefficientField p, CoefficientField a, KernelField f, real_t rho, real_t sigma);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t n() const noexcept { return grid_.n(); }
  const CoefficientField& p() const noexcept { return p_; }
  const CoefficientField& a() const noexcept { return a_; }
  const KernelField& f() const noexcept { return f_; }
  real_t rho() const noexcept { return rho_; }
  real_t sigma() const noexcept { return sigma_; }

 private:
  Grid grid_;
  CoefficientField p_;
  CoefficientField a_;
  KernelField f_;
  real_t rho_;
  real_t sigma_;
};

// Parsed `key = value` problem description. Unset keys take the defaults
// p = constant:0, rho = 1, sigma = 2; a and f are required.
struct ProblemConfig {
  std::optional<std::size_t> n;
  std::optional<real_t> rho;
  std::optional<real_t> sigma;
  std::optional<FieldSource> p;
  std::optional<FieldSource> a;
  std::optional<FieldSource> f;
};

// `base_dir` resolves relative `@path` references to tabulated data.
ProblemConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ProblemConfig load_config(const std::filesystem::path& path);

ProblemSpec build_problem(const ProblemConfig& config, std::size_t n);

// Non-fatal remarks about an instance (e.g. rho = 1).
std::vector<std::string> problem_notes(const ProblemSpec& spec);

}  // namespace beambranch
