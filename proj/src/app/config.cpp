#include "diffsr/app/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "diffsr/envs/registry.hpp"

namespace diffsr::app {
namespace {

using exploration::BonusMode;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double x) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec == std::errc() && p == end) return out;
  // Allow integral values written in scientific form, such as 1e6.
  double d = 0.0;
  auto [q, ec2] = std::from_chars(v.data(), end, d);
  if (ec2 == std::errc() && q == end && d == static_cast<double>(static_cast<std::int64_t>(d)))
    return static_cast<std::int64_t>(d);
  throw ConfigError(key + " expects an integer, got '" + v + "'");
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError(key + " expects a number, got '" + v + "'");
  return out;
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename Int>
Field int_field(Int agent::AgentConfig::*member, std::string key, std::int64_t lo, std::int64_t hi = INT64_MAX) {
  return {[=](RunConfig& c, const std::string& v) {
            const std::int64_t x = parse_int(key, v);
            check(x >= lo && x <= hi, key + " must lie in [" + std::to_string(lo) + ", " +
                                          (hi == INT64_MAX ? std::string("inf") : std::to_string(hi)) + "]");
            c.agent.*member = static_cast<Int>(x);
          },
          [=](const RunConfig& c) { return std::to_string(c.agent.*member); }};
}

Field real_field(double agent::AgentConfig::*member, std::string key, std::function<bool(double)> ok,
                 std::string range) {
  return {[=](RunConfig& c, const std::string& v) {
            const double x = parse_double(key, v);
            check(ok(x), key + " must lie in " + range);
            c.agent.*member = x;
          },
          [=](const RunConfig& c) { return format_double(c.agent.*member); }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    using A = agent::AgentConfig;
    std::map<std::string, Field> t;
    auto positive = [](double x) { return x > 0.0; };
    auto nonneg = [](double x) { return x >= 0.0; };
    auto open_unit = [](double x) { return x > 0.0 && x < 1.0; };
    t["env"] = {[](RunConfig& c, const std::string& v) {
                  check(envs::is_known_environment(v), "env: unknown environment '" + v + "'");
                  c.agent.env = v;
                },
                [](const RunConfig& c) { return "\"" + c.agent.env + "\""; }};
    t["history_len"] = int_field(&A::history_len, "history_len", 1, 64);
    t["seed"] = {[](RunConfig& c, const std::string& v) {
                   const std::int64_t x = parse_int("seed", v);
                   check(x >= 0, "seed must be >= 0");
                   c.agent.seed = static_cast<std::uint64_t>(x);
                 },
                 [](const RunConfig& c) { return std::to_string(c.agent.seed); }};
    t["total_steps"] = int_field(&A::total_steps, "total_steps", 0);
    t["buffer_capacity"] = int_field(&A::buffer_capacity, "buffer_capacity", 1);
    t["batch_size"] = int_field(&A::batch_size, "batch_size", 1, 1 << 20);
    t["noise_levels"] = int_field(&A::noise_levels, "noise_levels", 2, 1 << 20);
    t["beta_min"] = real_field(&A::beta_min, "beta_min", open_unit, "(0,1)");
    t["beta_max"] = real_field(&A::beta_max, "beta_max", open_unit, "(0,1)");
    t["feature_dim"] = int_field(&A::feature_dim, "feature_dim", 1, 1 << 16);
    t["fourier_dim"] = int_field(&A::fourier_dim, "fourier_dim", 1, 1 << 16);
    t["repr_dim"] = int_field(&A::repr_dim, "repr_dim", 1, 1 << 16);
    t["psi_width"] = int_field(&A::psi_width, "psi_width", 1, 1 << 16);
    t["psi_depth"] = int_field(&A::psi_depth, "psi_depth", 0, 16);
    t["zeta_width"] = int_field(&A::zeta_width, "zeta_width", 1, 1 << 16);
    t["zeta_depth"] = int_field(&A::zeta_depth, "zeta_depth", 0, 16);
    t["feature_update_ratio"] = int_field(&A::feature_update_ratio, "feature_update_ratio", 1);
    t["rep_steps"] = int_field(&A::rep_steps, "rep_steps", 0, 1 << 20);
    t["norm_weight"] = real_field(&A::norm_weight, "norm_weight", nonneg, "[0,inf)");
    t["bonus"] = {[](RunConfig& c, const std::string& v) { c.agent.bonus = exploration::parse_bonus_mode(v); },
                  [](const RunConfig& c) { return "\"" + exploration::to_string(c.agent.bonus) + "\""; }};
    t["bonus_scale"] = real_field(&A::bonus_scale, "bonus_scale", nonneg, "[0,inf)");
    t["bonus_lambda"] = real_field(&A::bonus_lambda, "bonus_lambda", positive, "(0,inf)");
    t["kernel_cap"] = int_field(&A::kernel_cap, "kernel_cap", 1, 1 << 20);
    t["lr_actor"] = real_field(&A::lr_actor, "lr_actor", positive, "(0,inf)");
    t["lr_critic"] = real_field(&A::lr_critic, "lr_critic", positive, "(0,inf)");
    t["lr_repr"] = real_field(&A::lr_repr, "lr_repr", positive, "(0,inf)");
    t["gamma"] = real_field(&A::gamma, "gamma", [](double x) { return x >= 0.0 && x < 1.0; }, "[0,1)");
    t["tau"] = real_field(&A::tau, "tau", [](double x) { return x >= 0.0 && x <= 1.0; }, "[0,1]");
    t["temperature"] = real_field(&A::temperature, "temperature", nonneg, "[0,inf)");
    t["actor_width"] = int_field(&A::actor_width, "actor_width", 1, 1 << 16);
    t["actor_depth"] = int_field(&A::actor_depth, "actor_depth", 0, 16);
    t["eval_interval"] = int_field(&A::eval_interval, "eval_interval", 1);
    t["eval_episodes"] = int_field(&A::eval_episodes, "eval_episodes", 1, 10000);
    t["warmup_steps"] = int_field(&A::warmup_steps, "warmup_steps", 0);
    t["output_dir"] = {[](RunConfig& c, const std::string& v) {
                         check(!v.empty(), "output_dir must not be empty");
                         c.output_dir = v;
                       },
                       [](const RunConfig& c) { return "\"" + c.output_dir + "\""; }};
    t["checkpoint_interval"] = {[](RunConfig& c, const std::string& v) {
                                  const std::int64_t x = parse_int("checkpoint_interval", v);
                                  check(x >= 0, "checkpoint_interval must be >= 0");
                                  c.checkpoint_interval = x;
                                },
                                [](const RunConfig& c) { return std::to_string(c.checkpoint_interval); }};
    return t;
  }();
  return table;
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "env", "history_len", "seed", "total_steps", "buffer_capacity", "batch_size",
      "noise_levels", "beta_min", "beta_max", "feature_dim", "fourier_dim", "repr_dim",
      "psi_width", "psi_depth", "zeta_width", "zeta_depth", "feature_update_ratio", "rep_steps",
      "norm_weight", "bonus", "bonus_scale", "bonus_lambda", "kernel_cap", "lr_actor",
      "lr_critic", "lr_repr", "gamma", "tau", "temperature", "actor_width",
      "actor_depth", "eval_interval", "eval_episodes", "warmup_steps", "output_dir", "checkpoint_interval"};
  return keys;
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value, const std::string& where) {
  const auto& table = fields();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError(where + ": unknown key '" + key + "'");
  try {
    it->second.set(config, unquote(trim(value)));
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

RunConfig parse_config_text(const std::string& text, const std::string& source) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++number;
    const std::string where = source + ":" + std::to_string(number);
    std::string body = trim(line);
    if (body.empty() || body.front() == '#' || body.front() == ';') continue;
    if (body.front() == '[') {
      if (body.back() != ']' || body.size() < 3) throw ConfigError(where + ": malformed section header");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (!value.empty() && value.front() != '"') {
      const auto hash = value.find('#');
      if (hash != std::string::npos) value = trim(value.substr(0, hash));
    }
    if (!seen.insert(key).second && fields().count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    apply_setting(config, key, value, where);
  }
  try {
    config.agent.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return config;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

std::string config_echo(const RunConfig& config) {
  std::string out;
  for (const std::string& key : config_keys()) out += key + " = " + fields().at(key).get(config) + "\n";
  return out;
}

std::filesystem::path resolve_output_dir(const RunConfig& config) {
  std::filesystem::path dir(config.output_dir);
  if (dir.is_relative()) {
    if (const char* root = std::getenv(kOutputRootVar); root && *root) return std::filesystem::path(root) / dir;
  }
  return dir;
}

}  // namespace diffsr::app
