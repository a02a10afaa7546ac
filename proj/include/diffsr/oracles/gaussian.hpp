#pragma once

#include "diffsr/envs/linear_gaussian.hpp"

namespace diffsr::oracles {

/// Score of the corrupted dynamics N(√(1-β) m, ((1-β)σ₀² + β) I), m = As + Ba.
Vector analytic_score_gaussian(const envs::LinearGaussianMdp& env, const Vector& s, const Vector& a,
                               const Vector& s_tilde, double beta);

/// E[s' | s̃', s, a; β] = (σ₀² √(1-β) s̃' + β m) / ((1-β) σ₀² + β).
Vector posterior_mean_gaussian(const envs::LinearGaussianMdp& env, const Vector& s, const Vector& a,
                               const Vector& s_tilde, double beta);

/// Irreducible value of the score-matching loss at level β:
/// (1-β) d β σ₀² / (β + (1-β) σ₀²).
double diff_loss_floor_gaussian(const envs::LinearGaussianMdp& env, double beta);

}  // namespace diffsr::oracles
