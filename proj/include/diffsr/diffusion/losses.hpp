#pragma once

#include "diffsr/diffusion/head.hpp"
#include "diffsr/diffusion/schedule.hpp"
#include "diffsr/diffusion/score.hpp"
#include "diffsr/envs/transition.hpp"

namespace diffsr::diffusion {

struct DenoisingLoss {
  double loss = 0.0;
  ScorePairGrad grad;
};

/// Mean over the batch of |s̃' + β ψᵀζ(s̃', β) - target|², with exact
/// gradients for both networks. `target` carries the √(1-β) factor already.
DenoisingLoss denoising_loss(const ScorePair& sp, const Batch& s, const Batch& a, const Batch& s_tilde,
                             const Vector& beta, const Batch& target, Exec exec = Exec::parallel);

/// Score-matching loss with target √(1-β) s', given explicit corruption draws.
DenoisingLoss diff_loss(const ScorePair& sp, const envs::DynamicsBatch& batch, const CorruptionDraws& draws,
                        Exec exec = Exec::parallel);

/// Draws levels and noise from `rng`, then evaluates diff_loss.
DenoisingLoss diff_loss(const ScorePair& sp, const envs::DynamicsBatch& batch, const NoiseSchedule& schedule,
                        Rng& rng, Exec exec = Exec::parallel);

/// Same objective with the posterior mean E[s' | s̃', s, a; β] in place of s'.
DenoisingLoss posterior_matching_loss(const ScorePair& sp, const Batch& s, const Batch& a,
                                      const Batch& s_tilde, const Vector& beta, const Batch& posterior_mean,
                                      Exec exec = Exec::parallel);

struct NormLoss {
  double loss = 0.0;
  MlpGrad psi;
  MlpGrad head;
};

inline constexpr double kNormLogFloor = 1e-12;

/// Mean of (|ψ(s,a)|² - log max(|φ(s,a)|², 1e-12))² with gradients for ψ and
/// the head.
NormLoss norm_loss(const ScorePair& sp, const ReprHead& head, const Batch& s, const Batch& a,
                   Exec exec = Exec::parallel);

}  // namespace diffsr::diffusion
