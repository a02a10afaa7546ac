#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "diffsr/numerics/linalg.hpp"

namespace diffsr {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment buffers for a fixed list of parameter tensors.
class AdamState {
 public:
  AdamState() = default;
  AdamState(AdamConfig config, const std::vector<ParamView>& params);

  const AdamConfig& config() const { return config_; }
  std::int64_t steps() const { return steps_; }
  std::vector<ParamView> moment_views();  // first moments then second moments

  /// Bias-corrected Adam update applied in place.
  void step(const std::vector<ParamView>& params, const std::vector<ParamView>& grads);

  void set_steps(std::int64_t steps) { steps_ = steps; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }

 private:
  AdamConfig config_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> first_;
  std::vector<std::vector<double>> second_;
  std::int64_t steps_ = 0;
};

inline void adam_step(AdamState& state, const std::vector<ParamView>& params,
                      const std::vector<ParamView>& grads) {
  state.step(params, grads);
}

}  // namespace diffsr
