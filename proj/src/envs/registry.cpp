#include "diffsr/envs/registry.hpp"

#include "diffsr/envs/linear_gaussian.hpp"
#include "diffsr/envs/pendulum.hpp"
#include "diffsr/envs/pomdp.hpp"
#include "diffsr/envs/tabular.hpp"

namespace diffsr::envs {
namespace {

constexpr std::string_view kMaskedSuffix = "-masked";

std::unique_ptr<Environment> make_base(const std::string& base) {
  if (base == "pendulum") return std::make_unique<Pendulum>();
  if (base == "lingauss") return std::make_unique<LinearGaussianMdp>(LinearGaussianMdp::standard(4, 2, 0.7));
  if (base == "chain") return std::make_unique<TabularEnv>(make_chain(5, 0.9), "chain", 50);
  if (base == "grid") return std::make_unique<TabularEnv>(make_grid(4, 4, 0.1, 0.95), "grid", 50);
  return nullptr;
}

std::pair<std::string, bool> split_name(const std::string& name) {
  if (name.size() > kMaskedSuffix.size() && name.ends_with(kMaskedSuffix))
    return {name.substr(0, name.size() - kMaskedSuffix.size()), true};
  return {name, false};
}

}  // namespace

bool is_known_environment(const std::string& name) {
  const auto [base, masked] = split_name(name);
  return base == "pendulum" || base == "lingauss" || base == "chain" || base == "grid";
}

std::unique_ptr<Environment> make_environment(const std::string& name, int history_len) {
  const auto [base, masked] = split_name(name);
  std::unique_ptr<Environment> env = make_base(base);
  if (!env) throw ConfigError("unknown environment '" + name + "'");
  if (history_len < 1) throw ConfigError("history_len must be >= 1");
  if (!masked && history_len == 1) return env;
  return std::make_unique<PartialObservationEnv>(std::move(env), masked, history_len);
}

}  // namespace diffsr::envs
