#include "diffsr/diffusion/trainer.hpp"

#include <cmath>
#include <numbers>

namespace diffsr::diffusion {

ScorePairOptimizer::ScorePairOptimizer(ScorePair& sp, double learning_rate)
    : psi(AdamConfig{.learning_rate = learning_rate}, sp.psi.parameters()),
      zeta(AdamConfig{.learning_rate = learning_rate}, sp.zeta.parameters()) {}

std::vector<ReprStepStats> train_representation(const envs::TransitionSource& buffer, ScorePair& sp,
                                                const ReprHead* head, const NoiseSchedule& schedule,
                                                const ReprTrainConfig& config, ScorePairOptimizer& opt, Rng& rng,
                                                Exec exec) {
  std::vector<ReprStepStats> history;
  if (config.steps <= 0) return history;
  if (buffer.size() < static_cast<std::size_t>(config.batch_size))
    throw ContractError("train_representation: buffer holds " + std::to_string(buffer.size()) +
                        " transitions, batch needs " + std::to_string(config.batch_size));
  const bool use_norm = config.norm_weight > 0.0 && head != nullptr;
  history.reserve(static_cast<std::size_t>(config.steps));
  for (int step = 0; step < config.steps; ++step) {
    if (config.final_learning_rate >= 0.0) {
      const double progress = static_cast<double>(step) / static_cast<double>(config.steps);
      const double lr = config.final_learning_rate + 0.5 * (config.learning_rate - config.final_learning_rate) *
                                                         (1.0 + std::cos(std::numbers::pi * progress));
      opt.psi.set_learning_rate(lr);
      opt.zeta.set_learning_rate(lr);
    }
    const envs::DynamicsBatch batch = buffer.sample_dynamics(static_cast<std::size_t>(config.batch_size), rng);
    DenoisingLoss diff = diff_loss(sp, batch, schedule, rng, exec);
    ReprStepStats stats{diff.loss, 0.0};
    if (use_norm) {
      NormLoss norm = norm_loss(sp, *head, batch.s, batch.a, exec);
      stats.norm_loss = norm.loss;
      norm.psi *= config.norm_weight;
      diff.grad.psi += norm.psi;
    }
    opt.psi.step(sp.psi.parameters(), diff.grad.psi.views());
    opt.zeta.step(sp.zeta.parameters(), diff.grad.zeta.views());
    history.push_back(stats);
  }
  return history;
}

}  // namespace diffsr::diffusion
