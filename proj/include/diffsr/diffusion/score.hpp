#pragma once

#include "diffsr/numerics/mlp.hpp"
#include "diffsr/numerics/rng.hpp"

namespace diffsr::diffusion {

struct ScorePairConfig {
  Eigen::Index state_dim = 0;
  Eigen::Index action_dim = 0;
  Eigen::Index feature_dim = 32;  // m
  Eigen::Index psi_width = 256;
  int psi_depth = 1;
  Eigen::Index zeta_width = 512;
  int zeta_depth = 1;
};

/// Factorized score ψ(s,a)ᵀ ζ(s̃', β).
///
/// ψ maps [s; a] to ℝ^m. ζ maps [s̃'; β; √(1-β)] to an m x d matrix emitted
/// as a flat row-major vector, so that the score ψᵀζ lands in ℝ^d.
struct ScorePair {
  Mlp psi;
  Mlp zeta;
  Eigen::Index feature_dim = 0;  // m
  Eigen::Index state_dim = 0;    // d

  static ScorePair create(const ScorePairConfig& config, Rng& rng);
  void validate() const;

  Batch psi_features(const Batch& s, const Batch& a, Exec exec = Exec::parallel) const;
  Batch score(const Batch& s, const Batch& a, const Batch& s_tilde, const Vector& beta,
              Exec exec = Exec::parallel) const;
};

/// [s̃; β; √(1-β)] for every column.
Batch zeta_input(const Batch& s_tilde, const Vector& beta);

/// ψ(s,a)ᵀ ζ(s̃', β) for a single sample.
Vector score_eval(const ScorePair& sp, const Vector& s, const Vector& a, const Vector& s_tilde, double beta);

struct ScorePairGrad {
  MlpGrad psi;
  MlpGrad zeta;
};

}  // namespace diffsr::diffusion
