#pragma once

#include <vector>

#include "diffsr/diffusion/head.hpp"
#include "diffsr/diffusion/losses.hpp"
#include "diffsr/diffusion/schedule.hpp"
#include "diffsr/envs/transition.hpp"
#include "diffsr/numerics/adam.hpp"

namespace diffsr::diffusion {

struct ReprTrainConfig {
  int steps = 1;            // N_rep
  int batch_size = 1024;
  double norm_weight = 0.0; // λ on norm_loss; 0 disables it
  double learning_rate = 1e-4;
  /// When >= 0, the rate follows a cosine from learning_rate down to this
  /// value over the call. Otherwise the optimizer's own rate is left alone.
  double final_learning_rate = -1.0;
};

/// Adam moments for ψ and ζ, kept across calls.
struct ScorePairOptimizer {
  AdamState psi;
  AdamState zeta;

  ScorePairOptimizer() = default;
  ScorePairOptimizer(ScorePair& sp, double learning_rate);
};

struct ReprStepStats {
  double diff_loss = 0.0;
  double norm_loss = 0.0;
};

/// Score-matching training of ψ and ζ on transitions from `buffer`: sample a
/// batch, draw a level per sample, corrupt s', descend the loss. Rewards are
/// never read. The head, when given, only enters through norm_loss.
std::vector<ReprStepStats> train_representation(const envs::TransitionSource& buffer, ScorePair& sp,
                                                const ReprHead* head, const NoiseSchedule& schedule,
                                                const ReprTrainConfig& config, ScorePairOptimizer& opt, Rng& rng,
                                                Exec exec = Exec::parallel);

}  // namespace diffsr::diffusion
