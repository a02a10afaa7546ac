#include "diffsr/numerics/adam.hpp"

#include <cmath>

namespace diffsr {

AdamState::AdamState(AdamConfig config, const std::vector<ParamView>& params) : config_(config) {
  for (const ParamView& p : params) {
    names_.push_back(p.name);
    first_.emplace_back(p.data.size(), 0.0);
    second_.emplace_back(p.data.size(), 0.0);
  }
}

std::vector<ParamView> AdamState::moment_views() {
  std::vector<ParamView> out;
  for (std::size_t i = 0; i < first_.size(); ++i) out.push_back({names_[i] + ".m", first_[i]});
  for (std::size_t i = 0; i < second_.size(); ++i) out.push_back({names_[i] + ".v", second_[i]});
  return out;
}

void AdamState::step(const std::vector<ParamView>& params, const std::vector<ParamView>& grads) {
  if (params.size() != first_.size() || grads.size() != first_.size())
    throw DimensionError("adam_step: expected " + std::to_string(first_.size()) + " tensors, got " +
                         std::to_string(params.size()) + " params and " + std::to_string(grads.size()) +
                         " grads");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].data.size() != first_[i].size() || grads[i].data.size() != first_[i].size())
      throw DimensionError("adam_step: size mismatch for " + names_[i]);
    if (!all_finite(grads[i].data))
      throw PoisonError("adam_step: non-finite gradient in " + names_[i]);
  }

  ++steps_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  const double lr = config_.learning_rate;
  for (std::size_t i = 0; i < params.size(); ++i) {
    std::span<double> p = params[i].data;
    std::span<const double> g = grads[i].data;
    std::vector<double>& m = first_[i];
    std::vector<double>& v = second_[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = b1 * m[k] + (1.0 - b1) * g[k];
      v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
      p[k] -= lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + config_.epsilon);
    }
  }
}

}  // namespace diffsr
