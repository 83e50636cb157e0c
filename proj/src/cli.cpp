#include "beambranch/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "beambranch/error.hpp"

namespace beambranch::cli {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt17(real_t v) { return fmt17(to_double(v)); }

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

void validate(const RunConfig& c) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0)) throw Error(ErrorCode::MalformedConfig, std::string(name) + " must be positive");
  };
  positive(c.ds, "--ds");
  positive(c.lambda_max, "--lambda-max");
  positive(c.lambda_target, "--lambda");
  positive(c.epsilon, "--epsilon");
  positive(c.newton_tol, "--newton-tol");
  if (c.n && *c.n < Grid::min_nodes) throw Error(ErrorCode::MalformedConfig, "--n must be at least 3");
  if (c.modes > max_modes) {
    throw Error(ErrorCode::MalformedConfig, "--modes must be at most " + std::to_string(max_modes));
  }
}

ProblemSpec load_problem(const RunConfig& c, std::ostream& err) {
  const ProblemConfig pc = load_config(c.problem);
  ProblemSpec spec = build_problem(pc, c.n.value_or(pc.n.value_or(default_n)));
  for (const auto& note : problem_notes(spec)) err << "note: " << note << '\n';
  return spec;
}

// Writes to config.out when given, else to the fallback stream.
template <class Fn>
void emit(const RunConfig& c, std::ostream& fallback, Fn&& write) {
  if (!c.out) {
    write(fallback);
    return;
  }
  std::ofstream file(*c.out);
  if (!file) throw Error(ErrorCode::Io, "cannot open output file " + c.out->string());
  write(file);
  if (!file) throw Error(ErrorCode::Io, "failed writing " + c.out->string());
}

BranchOptions branch_options(const RunConfig& c) {
  BranchOptions o;
  o.ds = c.ds;
  o.max_steps = c.max_steps;
  o.lambda_max = c.lambda_max;
  o.epsilon = c.epsilon;
  o.newton_tol = c.newton_tol;
  return o;
}

void warn_hypotheses(const ProblemSpec& spec, std::ostream& err) {
  const HypothesisReport report = check_hypotheses(spec);
  if (!report.theorem_applies) {
    err << "warning: existence hypotheses do not all hold (H1 " << report.h1.holds << ", H2 " << report.h2.holds
        << ", H3 " << report.h3.holds << ", K(i) " << report.k1.holds
        << "); tracing anyway, a lambda = 1 crossing is not guaranteed\n";
  }
}

nlohmann::json point_json(std::size_t step, const BranchPoint& p) {
  return {{"step", step},
          {"lambda", to_double(p.lambda)},
          {"sup_norm", to_double(p.sup_norm)},
          {"min_value", to_double(p.min_value)},
          {"residual_norm", to_double(p.residual_norm)},
          {"arclength", to_double(p.arclength)}};
}

}  // namespace

nlohmann::json to_json(const HypothesisReport& r) {
  nlohmann::json j;
  j["h1"] = {{"holds", r.h1.holds}, {"min_p_plus_pi2", r.h1.min_p_plus_pi2}};
  j["h2"] = {{"holds", r.h2.holds}, {"max_a", r.h2.max_a}, {"min_window_max", r.h2.min_window_max},
             {"window", r.h2.window}};
  j["h3"] = {{"holds", r.h3.holds}, {"lhs", r.h3.lhs}, {"rhs", r.h3.rhs}};
  j["k1"] = {{"holds", r.k1.holds}, {"min_f", r.k1.min_f}};
  j["k2_sufficient"] = {{"holds", r.k2_sufficient.holds}, {"strip_min", r.k2_sufficient.strip_min},
                        {"strip_delta", r.k2_sufficient.strip_delta}};
  j["lambda1"] = number_or_null(r.lambda1);
  if (!r.lambda1_error.empty()) j["lambda1_error"] = r.lambda1_error;
  j["theorem_applies"] = r.theorem_applies;
  return j;
}

nlohmann::json to_json(const Branch& b) {
  nlohmann::json j;
  j["status"] = std::string(to_string(b.status));
  j["termination"] = std::string(to_string(b.termination));
  j["start_lambda"] = to_double(b.start_lambda);
  j["steps"] = b.steps;
  j["direction_reversals"] = b.direction_reversals;
  j["lambda_monotone"] = b.lambda_monotone;
  j["crossing_step"] = b.crossing ? nlohmann::json(*b.crossing) : nlohmann::json();
  auto& pts = j["points"] = nlohmann::json::array();
  for (std::size_t i = 0; i < b.points.size(); ++i) pts.push_back(point_json(i, b.points[i]));
  j["notes"] = b.notes;
  return j;
}

void write_eigen_csv(std::ostream& os, std::span<const EigenPair> pairs) {
  os << "k,lambda_k,nodal_count,residual\n";
  for (const auto& p : pairs) {
    os << p.index << ',' << fmt17(p.lambda) << ',' << p.nodal_count << ',' << fmt17(p.residual) << '\n';
  }
}

void write_branch_csv(std::ostream& os, const Branch& b) {
  os << branch_csv_header << '\n';
  for (std::size_t i = 0; i < b.points.size(); ++i) {
    const auto& p = b.points[i];
    os << i << ',' << fmt17(p.lambda) << ',' << fmt17(p.sup_norm) << ',' << fmt17(p.min_value) << ','
       << fmt17(p.residual_norm) << ',' << fmt17(p.arclength) << '\n';
  }
  os << "# status=" << to_string(b.status) << " start_lambda=" << fmt17(b.start_lambda) << " steps=" << b.steps
     << " crossing_step=" << (b.crossing ? std::to_string(*b.crossing) : std::string("none")) << '\n';
}

void write_solution_csv(std::ostream& os, const Grid& grid, std::span<const real_t> u) {
  os << solution_csv_header << '\n';
  os << "0,0\n";
  for (std::size_t j = 0; j < u.size(); ++j) os << xp::format(grid.node(j)) << ',' << xp::format(u[j]) << '\n';
  os << "1,0\n";
}

SolutionTable read_solution_csv(std::istream& is) {
  SolutionTable t;
  std::string line;
  if (!std::getline(is, line) || line != solution_csv_header) {
    throw Error(ErrorCode::MalformedConfig, "solution file must start with header 'x,u'");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::MalformedConfig, "bad solution row: " + line);
    t.x.push_back(xp::parse(line.substr(0, comma)));
    t.u.push_back(xp::parse(line.substr(comma + 1)));
  }
  return t;
}

nlohmann::json solution_sidecar(const BranchPoint& p) {
  return {{"lambda", to_double(p.lambda)},
          {"sup_norm", to_double(p.sup_norm)},
          {"min_value", to_double(p.min_value)},
          {"residual_norm", to_double(p.residual_norm)}};
}

int run_check(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    validate(c);
    const ProblemSpec spec = load_problem(c, err);
    const HypothesisReport report = check_hypotheses(spec);
    emit(c, out, [&](std::ostream& os) { os << to_json(report).dump(2) << '\n'; });
    return report.theorem_applies ? exit_ok : exit_hypotheses_fail;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_error;
  }
}

int run_eigen(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    validate(c);
    const ProblemSpec spec = load_problem(c, err);
    std::vector<EigenPair> pairs;
    if (c.modes > 0) {
      const OperatorFactorization op(spec);
      pairs.push_back(principal_eigenpair(op, spec.a().samples));
      auto higher = higher_eigenpairs(op, spec.a().samples, pairs.front(), c.modes - 1);
      std::move(higher.begin(), higher.end(), std::back_inserter(pairs));
    }
    emit(c, out, [&](std::ostream& os) {
      if (c.format == Format::Json) {
        auto arr = nlohmann::json::array();
        for (const auto& p : pairs) {
          arr.push_back({{"k", p.index},
                         {"lambda_k", to_double(p.lambda)},
                         {"nodal_count", p.nodal_count},
                         {"residual", to_double(p.residual)}});
        }
        os << arr.dump(2) << '\n';
      } else {
        write_eigen_csv(os, pairs);
      }
    });
    return exit_ok;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_error;
  }
}

int run_branch(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    validate(c);
    const Discretization d(load_problem(c, err));
    warn_hypotheses(d.spec, err);
    const EigenPair principal = principal_eigenpair(d.op, d.spec.a().samples);
    const Branch branch = trace_branch(d, principal, branch_options(c));
    for (const auto& note : branch.notes) err << "note: " << note << '\n';
    emit(c, out, [&](std::ostream& os) {
      if (c.format == Format::Json) {
        os << to_json(branch).dump(2) << '\n';
      } else {
        write_branch_csv(os, branch);
      }
    });
    const bool failed =
        branch.status == BranchStatus::NewtonFailure || branch.status == BranchStatus::FailedPositivity;
    return failed ? exit_solve_fail : exit_ok;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_error;
  }
}

int run_solve(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    validate(c);
    const Discretization d(load_problem(c, err));
    warn_hypotheses(d.spec, err);
    const EigenPair principal = principal_eigenpair(d.op, d.spec.a().samples);
    BranchOptions options = branch_options(c);
    options.lambda_max = std::max(options.lambda_max, 1.25 * c.lambda_target);
    const Branch branch = trace_branch(d, principal, options);
    BranchPoint solution;
    try {
      solution = solve_at_lambda(d, branch, real_t(c.lambda_target), options);
    } catch (const Error& e) {
      err << "error: " << e.what() << " (branch status " << to_string(branch.status) << ")\n";
      return exit_solve_fail;
    }
    const nlohmann::json sidecar = solution_sidecar(solution);
    emit(c, out, [&](std::ostream& os) {
      if (c.format == Format::Json) {
        nlohmann::json j = sidecar;
        j["x"] = to_double(d.spec.grid().nodes());
        j["u"] = to_double(solution.u);
        os << j.dump(2) << '\n';
      } else {
        write_solution_csv(os, d.spec.grid(), solution.u);
      }
    });
    if (c.format == Format::Csv) {
      if (c.out) {
        const std::filesystem::path side = c.out->string() + ".json";
        std::ofstream file(side);
        if (!file) throw Error(ErrorCode::Io, "cannot open sidecar " + side.string());
        file << sidecar.dump(2) << '\n';
      } else {
        err << "sidecar: " << sidecar.dump() << '\n';
      }
    }
    return exit_ok;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_error;
  }
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  switch (c.command) {
    case Command::Check: return run_check(c, out, err);
    case Command::Eigen: return run_eigen(c, out, err);
    case Command::Branch: return run_branch(c, out, err);
    case Command::Solve: return run_solve(c, out, err);
  }
  return exit_error;
}

}  // namespace beambranch::cli
