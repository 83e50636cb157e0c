#include <doctest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "beambranch/cli.hpp"
#include "test_support.hpp"

using namespace beambranch;
using namespace beambranch::cli;

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "beambranch_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_config(const std::string& name, const std::string& body) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << body;
  return p;
}

fs::path benchmark_config() {
  return write_config("benchmark.cfg", "n = 199\np = constant:0\na = constant:100\nf = constant:1\n");
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_with(RunConfig c) {
  std::ostringstream out, err;
  const int code = run(c, out, err);
  return {code, out.str(), err.str()};
}

RunConfig config_for(Command command, const fs::path& problem) {
  RunConfig c;
  c.command = command;
  c.problem = problem;
  return c;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) v.push_back(line);
  return v;
}

std::vector<std::string> split(const std::string& row) {
  std::vector<std::string> v;
  std::stringstream ss(row);
  for (std::string cell; std::getline(ss, cell, ',');) v.push_back(cell);
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("check") {
  SUBCASE("benchmark holds") {
    const Outcome o = run_with(config_for(Command::Check, benchmark_config()));
    CHECK(o.code == exit_ok);
    const auto j = nlohmann::json::parse(o.out);
    CHECK(j["h3"]["lhs"].get<double>() == doctest::Approx(97.409).epsilon(1e-4));
    CHECK(j["h3"]["rhs"].get<double>() == 100.0);
    CHECK(j["theorem_applies"].get<bool>());
    for (const char* key : {"h1", "h2", "h3", "k1", "k2_sufficient", "lambda1", "theorem_applies"}) {
      CHECK(j.contains(key));
    }
    CHECK(o.err.find("note: rho = 1") != std::string::npos);
  }
  SUBCASE("a = 90 fails the hypotheses") {
    const auto cfg = write_config("a90.cfg", "a = constant:90\nf = constant:1\n");
    const Outcome o = run_with(config_for(Command::Check, cfg));
    CHECK(o.code == exit_hypotheses_fail);
    CHECK_FALSE(nlohmann::json::parse(o.out)["theorem_applies"].get<bool>());
  }
  SUBCASE("missing file") {
    const Outcome o = run_with(config_for(Command::Check, scratch() / "absent.cfg"));
    CHECK(o.code == exit_error);
    CHECK(o.err.find("error:") != std::string::npos);
  }
  SUBCASE("bad config values") {
    const auto cfg = write_config("neg.cfg", "a = constant:-1\nf = constant:1\n");
    CHECK(run_with(config_for(Command::Check, cfg)).code == exit_error);
    RunConfig c = config_for(Command::Check, benchmark_config());
    c.n = 2;
    CHECK(run_with(c).code == exit_error);
  }
}

TEST_CASE("eigen") {
  const auto cfg = write_config("unit.cfg", "n = 199\na = constant:1\nf = constant:1\n");
  RunConfig c = config_for(Command::Eigen, cfg);
  c.modes = 2;
  const Outcome o = run_with(c);
  REQUIRE(o.code == exit_ok);
  const auto rows = lines(o.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "k,lambda_k,nodal_count,residual");
  const auto r1 = split(rows[1]), r2 = split(rows[2]);
  CHECK(r1[0] == "1");
  CHECK(std::stod(r1[1]) == doctest::Approx(97.41).epsilon(1e-3));
  CHECK(r1[2] == "0");
  CHECK(r2[0] == "2");
  CHECK(std::stod(r2[1]) == doctest::Approx(1558.5).epsilon(1e-3));
  CHECK(r2[2] == "1");
  // Residuals are absolute; the operator scale is ~ lambda_k.
  CHECK(std::stod(r1[3]) < 1e-8 * std::stod(r1[1]));
  CHECK(std::stod(r2[3]) < 1e-8 * std::stod(r2[1]));

  c.modes = 0;
  CHECK(lines(run_with(c).out).size() == 1);
  CHECK(run_with(c).code == exit_ok);
  c.modes = 6;
  CHECK(run_with(c).code == exit_error);

  c.modes = 1;
  c.format = Format::Json;
  const auto j = nlohmann::json::parse(run_with(c).out);
  CHECK(j.size() == 1);
  CHECK(j[0]["nodal_count"] == 0);

  const auto zero = write_config("zero.cfg", "a = constant:0\nf = constant:1\n");
  CHECK(run_with(config_for(Command::Eigen, zero)).code == exit_error);
}

TEST_CASE("branch") {
  SUBCASE("benchmark crosses lambda = 1") {
    const Outcome o = run_with(config_for(Command::Branch, benchmark_config()));
    CHECK(o.code == exit_ok);
    const auto rows = lines(o.out);
    REQUIRE(rows.size() > 3);
    CHECK(rows.front() == branch_csv_header);
    CHECK(rows.back().rfind("# status=crossed_lambda_1", 0) == 0);
    bool found = false;
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
      const auto cells = split(rows[i]);
      REQUIRE(cells.size() == 6);
      CHECK(std::stoul(cells[0]) == i - 1);
      if (std::stod(cells[1]) == 1.0) {
        found = true;
        CHECK(std::stod(cells[2]) == doctest::Approx(2.2764).epsilon(1e-3));
        CHECK(std::stod(cells[4]) <= 1e-10);
      }
    }
    CHECK(found);
  }
  SUBCASE("a = 90 never brackets") {
    const auto cfg = write_config("a90.cfg", "a = constant:90\nf = constant:1\n");
    const Outcome o = run_with(config_for(Command::Branch, cfg));
    CHECK(o.code == exit_ok);
    CHECK(o.out.find("# status=reached_lambda_max") != std::string::npos);
    CHECK(o.out.find("crossing_step=none") != std::string::npos);
    CHECK(o.err.find("warning: existence hypotheses") != std::string::npos);
    for (std::size_t i = 1; i + 1 < lines(o.out).size(); ++i) CHECK(std::stod(split(lines(o.out)[i])[1]) > 1.0);
  }
  SUBCASE("step limit zero keeps only the start point") {
    RunConfig c = config_for(Command::Branch, benchmark_config());
    c.max_steps = 0;
    const Outcome o = run_with(c);
    CHECK(o.code == exit_ok);
    CHECK(lines(o.out).size() == 3);
    CHECK(o.out.find("# status=reached_max_steps") != std::string::npos);
  }
  SUBCASE("json") {
    RunConfig c = config_for(Command::Branch, benchmark_config());
    c.format = Format::Json;
    const auto j = nlohmann::json::parse(run_with(c).out);
    CHECK(j["status"] == "crossed_lambda_1");
    CHECK(j["lambda_monotone"].get<bool>());
    const auto step = j["crossing_step"].get<std::size_t>();
    CHECK(j["points"][step]["lambda"].get<double>() == 1.0);
  }
}

TEST_CASE("solve") {
  SUBCASE("benchmark profile and sidecar") {
    RunConfig c = config_for(Command::Solve, benchmark_config());
    c.out = scratch() / "solution.csv";
    const Outcome o = run_with(c);
    REQUIRE(o.code == exit_ok);
    std::ifstream in(*c.out);
    const SolutionTable t = read_solution_csv(in);
    REQUIRE(t.x.size() == 201);
    CHECK(t.x.front() == 0);
    CHECK(t.u.front() == 0);
    CHECK(t.x.back() == 1);
    CHECK(t.u.back() == 0);

    const auto side = nlohmann::json::parse(slurp(c.out->string() + ".json"));
    for (const char* key : {"lambda", "sup_norm", "min_value", "residual_norm"}) CHECK(side.contains(key));
    CHECK(side["lambda"].get<double>() == 1.0);
    CHECK(side["min_value"].get<double>() > 0);
    const double amp = side["sup_norm"].get<double>();
    CHECK(amp == doctest::Approx(2.2764).epsilon(1e-3));
    real_t dev = 0;
    for (std::size_t j = 1; j < 200; ++j) dev = fmaxq(dev, fabsq(t.u[j] / (real_t(amp) * sinq(M_PIq * t.x[j])) - 1));
    CHECK(to_double(dev) <= 1e-6);

    // Fresh residual of the written profile against the declared certificate.
    const Discretization d(build_problem(load_config(c.problem), 199));
    const Vec u(t.u.begin() + 1, t.u.end() - 1);
    for (std::size_t j = 0; j < 199; ++j) CHECK(t.x[j + 1] == d.spec.grid().node(j));
    const double fresh = to_double(sup_norm(residual(d, 1, u)));
    CHECK(fresh <= c.newton_tol);
    CHECK(fresh == doctest::Approx(side["residual_norm"].get<double>()).epsilon(1e-6));
  }
  SUBCASE("sidecar on stderr without an output file") {
    const Outcome o = run_with(config_for(Command::Solve, benchmark_config()));
    CHECK(o.code == exit_ok);
    CHECK(lines(o.out).front() == solution_csv_header);
    CHECK(o.err.find("sidecar: {") != std::string::npos);
  }
  SUBCASE("no bracket") {
    const auto cfg = write_config("a90.cfg", "a = constant:90\nf = constant:1\n");
    const Outcome o = run_with(config_for(Command::Solve, cfg));
    CHECK(o.code == exit_solve_fail);
    CHECK(o.err.find("NoBracket") != std::string::npos);
  }
  SUBCASE("smallest grid") {
    const auto cfg = write_config("toy.cfg", "n = 3\na = constant:100\nf = constant:1\n");
    RunConfig c = config_for(Command::Solve, cfg);
    c.format = Format::Json;
    const Outcome o = run_with(c);
    REQUIRE(o.code == exit_ok);
    const auto j = nlohmann::json::parse(o.out);
    CHECK(j["u"].size() == 3);
    CHECK(j["residual_norm"].get<double>() <= 1e-10);
    CHECK(j["min_value"].get<double>() > 0);
    // n = 3: h = 1/4, mu_1 = 16 (2 - 2 cos(pi/4)), amplitude sqrt(2 (100 - mu_1^2)).
    const double mu1 = (2 - 2 * std::cos(M_PI / 4)) * 16;
    CHECK(j["sup_norm"].get<double>() == doctest::Approx(std::sqrt(2 * (100 - mu1 * mu1))).epsilon(1e-12));
  }
}

TEST_CASE("identical configs give identical files") {
  for (Command cmd : {Command::Branch, Command::Solve}) {
    RunConfig c = config_for(cmd, benchmark_config());
    c.out = scratch() / "first.out";
    REQUIRE(run_with(c).code == exit_ok);
    const std::string first = slurp(*c.out);
    c.out = scratch() / "second.out";
    REQUIRE(run_with(c).code == exit_ok);
    CHECK(first == slurp(*c.out));
  }
}

TEST_CASE("command-line front end") {
  auto status = [](const std::string& args) {
    const std::string cmd = std::string(BEAMBRANCH_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  const std::string cfg = benchmark_config().string();
  const std::string a90 = write_config("a90.cfg", "a = constant:90\nf = constant:1\n").string();
  CHECK(status("check --config " + cfg) == 0);
  CHECK(status("check --config " + a90) == 2);
  CHECK(status("check --config " + (scratch() / "absent.cfg").string()) == 1);
  CHECK(status("eigen --config " + cfg + " --modes 3 --n 63 --format json") == 0);
  CHECK(status("solve --config " + a90 + " --lambda 1") == 3);
  CHECK(status("branch --config " + cfg + " --max-steps 0 --out " + (scratch() / "b.csv").string()) == 0);
  CHECK(lines(slurp(scratch() / "b.csv")).size() == 3);
  CHECK(status("frobnicate") == 1);
  CHECK(status("check") == 1);
  CHECK(status("check --config " + cfg + " --format xml") == 1);
}
