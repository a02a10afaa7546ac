#include "diffsr/diffusion/score.hpp"

#include <cmath>
#include <vector>

namespace diffsr::diffusion {

ScorePair ScorePair::create(const ScorePairConfig& config, Rng& rng) {
  if (config.state_dim <= 0 || config.action_dim <= 0 || config.feature_dim <= 0)
    throw ContractError("ScorePair: dimensions must be positive");
  ScorePair sp;
  sp.feature_dim = config.feature_dim;
  sp.state_dim = config.state_dim;
  const std::vector<Eigen::Index> psi_hidden(static_cast<std::size_t>(config.psi_depth), config.psi_width);
  const std::vector<Eigen::Index> zeta_hidden(static_cast<std::size_t>(config.zeta_depth), config.zeta_width);
  sp.psi = Mlp::create(config.state_dim + config.action_dim, psi_hidden, config.feature_dim, Activation::elu, rng);
  sp.zeta = Mlp::create(config.state_dim + 2, zeta_hidden, config.feature_dim * config.state_dim, Activation::elu,
                        rng);
  return sp;
}

void ScorePair::validate() const {
  if (psi.output_dim() != feature_dim)
    throw DimensionError("ScorePair: psi emits " + std::to_string(psi.output_dim()) + ", expected m = " +
                         std::to_string(feature_dim));
  if (zeta.output_dim() != feature_dim * state_dim)
    throw DimensionError("ScorePair: zeta emits " + std::to_string(zeta.output_dim()) +
                         ", which does not reshape to m x d = " + std::to_string(feature_dim) + " x " +
                         std::to_string(state_dim));
  if (zeta.input_dim() != state_dim + 2) throw DimensionError("ScorePair: zeta input must be d + 2");
}

Batch ScorePair::psi_features(const Batch& s, const Batch& a, Exec exec) const {
  return psi.evaluate(stack_rows(s, a), exec);
}

Batch zeta_input(const Batch& s_tilde, const Vector& beta) {
  require_length(beta, s_tilde.cols(), "zeta_input levels");
  Batch x(s_tilde.rows() + 2, s_tilde.cols());
  x.topRows(s_tilde.rows()) = s_tilde;
  for (Eigen::Index k = 0; k < s_tilde.cols(); ++k) {
    x(s_tilde.rows(), k) = beta(k);
    x(s_tilde.rows() + 1, k) = std::sqrt(1.0 - beta(k));
  }
  return x;
}

Batch ScorePair::score(const Batch& s, const Batch& a, const Batch& s_tilde, const Vector& beta, Exec exec) const {
  if (s_tilde.rows() != state_dim) throw DimensionError("ScorePair::score: s_tilde has wrong dimension");
  const Batch p = psi_features(s, a, exec);
  const Batch z = zeta.evaluate(zeta_input(s_tilde, beta), exec);
  Batch out;
  kernels::bilinear_contract(exec, p, z, state_dim, out);
  return out;
}

Vector score_eval(const ScorePair& sp, const Vector& s, const Vector& a, const Vector& s_tilde, double beta) {
  sp.validate();
  return sp.score(s, a, s_tilde, Vector::Constant(1, beta), Exec::serial).col(0);
}

}  // namespace diffsr::diffusion
