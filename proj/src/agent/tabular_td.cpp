#include "diffsr/agent/tabular_td.hpp"

namespace diffsr::agent {

Matrix td_policy_evaluation(const envs::TabularMdp& mdp, const Matrix& policy, double gamma,
                            const LinearTdConfig& config, Rng& rng) {
  mdp.validate();
  const int S = mdp.states(), A = mdp.actions();
  require_shape(policy, S, A, "td_policy_evaluation policy");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ContractError("td_policy_evaluation: discount must lie in [0,1)");
  if (config.batch_size < 1 || config.iterations < 0) throw ContractError("td_policy_evaluation: bad config");

  const auto dim = static_cast<std::size_t>(S * A);
  Vector xi = Vector::Zero(static_cast<Eigen::Index>(dim));
  Vector grad(xi.size());
  for (int it = 0; it < config.iterations; ++it) {
    grad.setZero();
    for (int k = 0; k < config.batch_size; ++k) {
      const int s = static_cast<int>(rng.index(static_cast<std::size_t>(S)));
      const int a = static_cast<int>(rng.index(static_cast<std::size_t>(A)));
      const int s_next = mdp.sample_next(s, a, rng);
      double v_next = 0.0;
      for (int b = 0; b < A; ++b) v_next += policy(s_next, b) * xi(s_next * A + b);
      const double err = mdp.reward(s, a) + gamma * v_next - xi(s * A + a);
      grad(s * A + a) -= err;
    }
    xi -= config.learning_rate * (static_cast<double>(dim) / config.batch_size) * grad;
  }
  Matrix q(S, A);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) q(s, a) = xi(s * A + a);
  return q;
}

}  // namespace diffsr::agent
