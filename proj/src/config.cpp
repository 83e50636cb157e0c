#include <fstream>
#include <sstream>

#include "beambranch/error.hpp"
#include "beambranch/problem.hpp"

namespace beambranch {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<real_t> read_numbers(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open tabulated data file " + path.string());
  std::vector<real_t> values;
  std::string token;
  while (in >> token) values.push_back(xp::parse(token));
  return values;
}

FieldSource parse_field(const std::string& key, const std::string& value, const std::filesystem::path& base_dir) {
  const auto colon = value.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::MalformedConfig, "value of '" + key + "' must be kind:params, got '" + value + "'");
  }
  FieldSource source{trim(value.substr(0, colon)), {}};
  const std::string rest = trim(value.substr(colon + 1));
  if (!rest.empty() && rest.front() == '@') {
    if (source.kind != "tabulated") {
      throw Error(ErrorCode::MalformedConfig, "'@path' data is only valid for tabulated fields ('" + key + "')");
    }
    std::filesystem::path file = rest.substr(1);
    if (file.is_relative() && !base_dir.empty()) file = base_dir / file;
    source.params = read_numbers(file);
    return source;
  }
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw Error(ErrorCode::MalformedConfig, "empty parameter in '" + key + "'");
    source.params.push_back(xp::parse(item));
  }
  return source;
}

}  // namespace

ProblemConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  ProblemConfig config;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::MalformedConfig, "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw Error(ErrorCode::MalformedConfig, "line " + std::to_string(lineno) + ": empty value");
    if (key == "n") {
      const real_t v = xp::parse(value);
      if (!(v >= 1) || floorq(v) != v) throw Error(ErrorCode::MalformedConfig, "n must be a positive integer");
      config.n = static_cast<std::size_t>(v);
    } else if (key == "rho") {
      config.rho = xp::parse(value);
    } else if (key == "sigma") {
      config.sigma = xp::parse(value);
    } else if (key == "p") {
      config.p = parse_field(key, value, base_dir);
    } else if (key == "a") {
      config.a = parse_field(key, value, base_dir);
    } else if (key == "f") {
      config.f = parse_field(key, value, base_dir);
    } else {
      throw Error(ErrorCode::MalformedConfig, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return config;
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

}  // namespace beambranch
