#pragma once

#include "diffsr/envs/tabular.hpp"

namespace diffsr::oracles {

/// Q* by iterating the Bellman optimality operator until the sup-norm change
/// guarantees |Q - Q*| < tol.
Matrix value_iteration(const envs::TabularMdp& mdp, double gamma, double tol = 1e-10);

/// Q^π from the linear system (I - γ P^π) V = r^π; policy is states x actions.
Matrix policy_eval_exact(const envs::TabularMdp& mdp, const Matrix& policy, double gamma);

/// Deterministic greedy policy (lowest index on ties) as a one-hot table.
Matrix greedy_policy(const Matrix& q);

}  // namespace diffsr::oracles
