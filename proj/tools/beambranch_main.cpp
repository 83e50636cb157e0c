#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "beambranch/cli.hpp"

using beambranch::cli::Command;
using beambranch::cli::Format;
using beambranch::cli::RunConfig;

int main(int argc, char** argv) {
  CLI::App app{"Positive solution branches of a nonlocal fourth-order hinged beam problem"};
  app.require_subcommand(1);

  RunConfig config;
  std::string config_path;
  std::size_t n = 0;
  std::string out;

  const std::map<std::string, Format> formats{{"csv", Format::Csv}, {"json", Format::Json}};

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "problem description (key = value)")->required();
    sub->add_option("--n", n, "interior grid nodes (overrides the config)")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "output path (default: stdout)");
    sub->add_option("--format", config.format, "csv or json")->transform(CLI::CheckedTransformer(formats));
  };
  auto add_branch = [&](CLI::App* sub) {
    sub->add_option("--ds", config.ds, "initial pseudo-arclength step")->check(CLI::PositiveNumber);
    sub->add_option("--max-steps", config.max_steps, "continuation step limit");
    sub->add_option("--lambda-max", config.lambda_max, "stop once lambda reaches this value")
        ->check(CLI::PositiveNumber);
    sub->add_option("--epsilon", config.epsilon, "amplitude of the first branch point")
        ->check(CLI::PositiveNumber);
    sub->add_option("--newton-tol", config.newton_tol, "sup-norm residual tolerance")->check(CLI::PositiveNumber);
  };

  auto* check = app.add_subcommand("check", "verify the existence hypotheses; exit 2 if they fail");
  add_common(check);

  auto* eigen = app.add_subcommand("eigen", "principal and higher eigenpairs of the weighted problem");
  add_common(eigen);
  eigen->add_option("--modes", config.modes, "number of modes (<= 5)");

  auto* branch = app.add_subcommand("branch", "trace the positive branch from (lambda_1, 0)");
  add_common(branch);
  add_branch(branch);

  auto* solve = app.add_subcommand("solve", "positive solution at a given lambda (default 1)");
  add_common(solve);
  add_branch(solve);
  solve->add_option("--lambda", config.lambda_target, "target parameter value")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : beambranch::cli::exit_error;
  }

  if (check->parsed()) config.command = Command::Check;
  if (eigen->parsed()) config.command = Command::Eigen;
  if (branch->parsed()) config.command = Command::Branch;
  if (solve->parsed()) config.command = Command::Solve;
  config.problem = config_path;
  if (n != 0) config.n = n;
  if (!out.empty()) config.out = out;

  return beambranch::cli::run(config, std::cout, std::cerr);
}
