#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>

#include <json.hpp>

#include "beambranch/continuation.hpp"
#include "beambranch/spectra.hpp"

namespace beambranch::cli {

enum class Command { Check, Eigen, Branch, Solve };
enum class Format { Csv, Json };

inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_hypotheses_fail = 2;
inline constexpr int exit_solve_fail = 3;

inline constexpr std::size_t default_n = 199;
inline constexpr std::size_t max_modes = 5;

struct RunConfig {
  Command command = Command::Check;
  std::filesystem::path problem;
  std::optional<std::size_t> n;
  double ds = 0.05;
  std::size_t max_steps = 400;
  double lambda_max = 2.0;
  double lambda_target = 1.0;
  std::size_t modes = 3;
  double epsilon = 1e-2;
  double newton_tol = 1e-10;
  std::optional<std::filesystem::path> out;
  Format format = Format::Csv;
};

// Each returns the process exit code; diagnostics go to `err`. Output goes
// to config.out when set, otherwise to `out`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_check(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_eigen(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_branch(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_solve(const RunConfig& config, std::ostream& out, std::ostream& err);

nlohmann::json to_json(const HypothesisReport& report);
nlohmann::json to_json(const Branch& branch);

inline constexpr const char* branch_csv_header = "step,lambda,sup_norm,min_value,residual_norm,arclength";
inline constexpr const char* solution_csv_header = "x,u";

void write_eigen_csv(std::ostream& os, std::span<const EigenPair> pairs);
void write_branch_csv(std::ostream& os, const Branch& branch);

// Includes the boundary zeros at x = 0 and x = 1. Values carry 36
// significant digits so the working-precision profile round-trips.
void write_solution_csv(std::ostream& os, const Grid& grid, std::span<const real_t> u);

struct SolutionTable {
  Vec x;
  Vec u;
};
SolutionTable read_solution_csv(std::istream& is);

nlohmann::json solution_sidecar(const BranchPoint& point);

}  // namespace beambranch::cli
