#pragma once

#include "diffsr/envs/tabular.hpp"

namespace diffsr::agent {

struct LinearTdConfig {
  int iterations = 4000;
  int batch_size = 256;
  double learning_rate = 0.5;
};

/// Policy evaluation by semi-gradient TD(0) on one-hot (s, a) features:
/// Q(s, a) = e_{s,a}ᵀ ξ. Each iteration samples (s, a) uniformly and s' from
/// the MDP, bootstraps with Σ_a' π(a'|s') Q(s', a'), and takes a batch
/// gradient step. Returns ξ reshaped to states x actions.
Matrix td_policy_evaluation(const envs::TabularMdp& mdp, const Matrix& policy, double gamma,
                            const LinearTdConfig& config, Rng& rng);

}  // namespace diffsr::agent
