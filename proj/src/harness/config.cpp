// SPDX-License-Identifier: Apache-2.0
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hrom/error.hpp"
#include "hrom/harness.hpp"

namespace hrom {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view value) {
  std::string_view body = value;
  bool log_form = false;
  if (body.starts_with("log(") && body.ends_with(")")) {
    body = trim(body.substr(4, body.size() - 5));
    log_form = true;
  }
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), out);
  if (ec != std::errc() || ptr != body.data() + body.size() || !std::isfinite(out))
    throw ConfigError("config: '" + std::string(key) + "' expects a number, got '" + std::string(value) + "'");
  if (log_form) {
    if (!(out > 0.0)) throw ConfigError("config: '" + std::string(key) + "': log of a non-positive number");
    out = std::log(out);
  }
  return out;
}

long long parse_integer(std::string_view key, std::string_view value) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError("config: '" + std::string(key) + "' expects an integer, got '" + std::string(value) + "'");
  return out;
}

int parse_int(std::string_view key, std::string_view value) {
  const long long v = parse_integer(key, value);
  if (v < -1'000'000'000LL || v > 1'000'000'000LL)
    throw ConfigError("config: '" + std::string(key) + "' is out of range");
  return static_cast<int>(v);
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "on" || value == "true" || value == "1" || value == "yes") return true;
  if (value == "off" || value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config: '" + std::string(key) + "' expects on/off, got '" + std::string(value) + "'");
}

using Setter = void (*)(ExperimentConfig&, std::string_view key, std::string_view value);

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"option", [](ExperimentConfig& c, std::string_view, std::string_view v) {
         c.spec.kind = option_kind_from_string(v);
       }},
      {"kappa", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.spec.params.kappa = parse_double(k, v); }},
      {"theta", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.spec.params.theta = parse_double(k, v); }},
      {"sigma", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.spec.params.sigma = parse_double(k, v); }},
      {"rho", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.spec.params.rho = parse_double(k, v); }},
      {"r_d", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.spec.params.r_d = parse_double(k, v); }},
      {"r_f", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.spec.params.r_f = parse_double(k, v); }},
      {"T", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.spec.params.T = parse_double(k, v); }},
      {"K", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.spec.params.K = parse_double(k, v); }},
      {"S0", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.spec.params.S0 = parse_double(k, v); }},
      {"v0", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.spec.params.v0 = parse_double(k, v); }},
      {"K1", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.spec.K1 = parse_double(k, v); }},
      {"K2", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.spec.K2 = parse_double(k, v); }},
      {"K3", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.spec.K3 = parse_double(k, v); }},
      {"blend", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.spec.blend = parse_double(k, v); }},
      {"alt_bc", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.spec.alt_bc = parse_bool(k, v); }},
      {"v_min", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.domain.v_min = parse_double(k, v); }},
      {"v_max", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.domain.v_max = parse_double(k, v); }},
      {"x_min", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.domain.x_min = parse_double(k, v); }},
      {"x_max", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.domain.x_max = parse_double(k, v); }},
      {"N_v", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.cells_v = parse_int(k, v); }},
      {"N_x", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.cells_x = parse_int(k, v); }},
      {"dt", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.dt = parse_double(k, v); }},
      {"degree", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.degree = parse_int(k, v); }},
      {"penalty", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.penalty = parse_double(k, v); }},
      {"modes_min", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.modes_min = parse_int(k, v); }},
      {"modes_max", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.modes_max = parse_int(k, v); }},
      {"pod_eps", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.pod_eps = parse_double(k, v); }},
      {"dmd_alg", [](ExperimentConfig& c, std::string_view, std::string_view v) { c.dmd_alg = dmd_algorithm_from_string(std::string(v)); }},
      {"dmd_rank_tol", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.dmd_rank_tol = parse_double(k, v); }},
      {"amplitudes", [](ExperimentConfig& c, std::string_view, std::string_view v) { c.amplitudes = amplitude_rule_from_string(std::string(v)); }},
      {"include_initial", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.include_initial = parse_bool(k, v); }},
      {"output_dir", [](ExperimentConfig& c, std::string_view, std::string_view v) { c.output_dir = std::string(v); }},
      {"seed", [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         const long long s = parse_integer(k, v);
         if (s < 0) throw ConfigError("config: seed must be non-negative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"timing_repeats", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.timing_repeats = parse_int(k, v); }},
  };
  return table;
}

}  // namespace

void ExperimentConfig::validate() const {
  spec.validate();
  domain.validate();
  if (cells_v < 1 || cells_x < 1) throw ConfigError("config: N_v and N_x must be positive");
  if (!(dt > 0.0)) throw ConfigError("config: dt must be positive");
  if (degree < 1 || degree > 3) throw ConfigError("config: degree must be 1, 2 or 3");
  if (!(penalty > 0.0)) throw ConfigError("config: penalty must be positive");
  if (modes_min < 1 || modes_max < modes_min) throw ConfigError("config: need 1 <= modes_min <= modes_max");
  if (!(pod_eps >= 0.0 && pod_eps < 1.0)) throw ConfigError("config: pod_eps must lie in [0, 1)");
  if (!(dmd_rank_tol > 0.0 && dmd_rank_tol < 1.0)) throw ConfigError("config: dmd_rank_tol must lie in (0, 1)");
  if (timing_repeats < 1) throw ConfigError("config: timing_repeats must be positive");
  if (output_dir.empty()) throw ConfigError("config: output_dir must not be empty");
  (void)TimeGrid::uniform(spec.params.T, dt);
  const double x0 = std::log(spec.params.S0 / spec.reference_strike());
  if (!domain.contains(Point(spec.params.v0, x0)))
    throw DomainError("config: evaluation point (v0, log(S0/K)) lies outside the domain");
}

ExperimentConfig config_from_preset(std::string_view name) {
  const Preset p = preset(name);
  ExperimentConfig c;
  c.preset = p.name;
  c.spec = p.spec;
  c.domain = p.domain;
  c.cells_v = p.cells_v;
  c.cells_x = p.cells_x;
  c.dt = p.dt;
  return c;
}

ExperimentConfig parse_config(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::set<std::string, std::less<>> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    if (key != "preset" && !setters().contains(key))
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw ConfigError("config line " + std::to_string(lineno) + ": repeated key '" + key + "'");
    entries.emplace_back(key, value);
  }

  ExperimentConfig config = config_from_preset(ExperimentConfig{}.preset);
  for (const auto& [key, value] : entries) {
    if (key != "preset") continue;
    try {
      config = config_from_preset(value);
    } catch (const Error&) {
      throw ConfigError("config: unknown preset '" + value + "'");
    }
  }
  for (const auto& [key, value] : entries)
    if (key != "preset") setters().find(key)->second(config, key, value);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::pair<int, int> parse_mode_range(std::string_view text) {
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    const int n = parse_int("--modes", trim(text));
    if (n < 1) throw ConfigError("--modes: mode count must be positive");
    return {n, n};
  }
  const int a = parse_int("--modes", trim(text.substr(0, dots)));
  const int b = parse_int("--modes", trim(text.substr(dots + 2)));
  if (a < 1 || b < a) throw ConfigError("--modes: need 1 <= a <= b in a..b");
  return {a, b};
}

}  // namespace hrom
