#include "diffsr/agent/critic.hpp"

#include <cmath>

namespace diffsr::agent {

Critic Critic::create(Eigen::Index feature_dim, Eigen::Index fourier_dim, Eigen::Index repr_dim, Rng& rng) {
  Critic c;
  for (int i = 0; i < 2; ++i) {
    c.head[i] = diffusion::ReprHead::create(feature_dim, fourier_dim, repr_dim, rng);
    c.xi[i] = Vector::Zero(repr_dim);
    c.target_head[i] = c.head[i];
    c.target_xi[i] = c.xi[i];
  }
  return c;
}

void Critic::validate() const {
  for (int i = 0; i < 2; ++i) {
    if (xi[i].size() != head[i].repr_dim() || target_xi[i].size() != target_head[i].repr_dim() ||
        xi[i].size() != xi[0].size())
      throw DimensionError("Critic: ξ and head dimensions disagree");
    if (head[i].input_dim() != head[0].input_dim() || target_head[i].input_dim() != head[0].input_dim())
      throw DimensionError("Critic: heads disagree on the ψ dimension");
  }
}

namespace {

std::pair<const diffusion::ReprHead&, const Vector&> pick(const Critic& c, QWhich which) {
  switch (which) {
    case QWhich::online1: return {c.head[0], c.xi[0]};
    case QWhich::online2: return {c.head[1], c.xi[1]};
    case QWhich::target1: return {c.target_head[0], c.target_xi[0]};
    case QWhich::target2: return {c.target_head[1], c.target_xi[1]};
  }
  throw ContractError("q_value: unknown critic selector");
}

}  // namespace

Vector q_values(const Critic& critic, const Batch& psi, QWhich which, Exec exec) {
  const auto [head, xi] = pick(critic, which);
  return head.apply(psi, exec).transpose() * xi;
}

double q_value(const Critic& critic, const diffusion::ScorePair& sp, const Vector& s, const Vector& a,
               QWhich which) {
  const Batch psi = sp.psi_features(Batch(s), Batch(a), Exec::serial);
  return q_values(critic, psi, which, Exec::serial)(0);
}

CriticLoss critic_loss(const Critic& critic, const Batch& psi, const Vector& targets, Exec exec) {
  const Eigen::Index n = psi.cols();
  if (n == 0) throw ContractError("critic_update: empty batch");
  require_length(targets, n, "critic_update targets");
  if (!targets.allFinite()) throw PoisonError("critic_update: non-finite TD target");
  CriticLoss out;
  for (int i = 0; i < 2; ++i) {
    const MlpTape tape = critic.head[i].net().forward(psi, exec);
    const Batch& phi = tape.output;
    const Vector err = phi.transpose() * critic.xi[i] - targets;
    out.per_critic[i] = err.squaredNorm() / static_cast<double>(n);
    const Vector g = (2.0 / static_cast<double>(n)) * err;
    out.dxi[i] = phi * g;
    out.dhead[i] = critic.head[i].net().backward(tape, critic.xi[i] * g.transpose(), nullptr, exec);
  }
  out.loss = 0.5 * (out.per_critic[0] + out.per_critic[1]);
  return out;
}

TdTargets td_targets(const Critic& critic, const diffusion::ScorePair& sp, const Policy& policy,
                     const envs::TransitionBatch& batch, double gamma, double temperature, const Vector& bonus,
                     const Batch& next_eps, Exec exec) {
  const Eigen::Index n = batch.size();
  if (n == 0) throw ContractError("critic_update: empty batch");
  const PolicySample next = policy.sample(batch.s_next, next_eps, exec);
  const Batch psi_next = sp.psi_features(batch.s_next, next.action, exec);
  const Vector q1 = q_values(critic, psi_next, QWhich::target1, exec);
  const Vector q2 = q_values(critic, psi_next, QWhich::target2, exec);
  TdTargets out;
  out.min_target_q = q1.cwiseMin(q2);
  out.next_log_prob = next.log_prob;
  const Vector soft = out.min_target_q - temperature * next.log_prob;
  out.y = batch.r + gamma * (Vector::Ones(n) - batch.done).cwiseProduct(soft);
  if (bonus.size() > 0) {
    require_length(bonus, n, "critic_update bonus");
    out.y += bonus;
  }
  if (!out.y.allFinite()) throw PoisonError("critic_update: non-finite TD target");
  return out;
}

CriticOptimizer::CriticOptimizer(Critic& critic, double critic_lr, double repr_lr) {
  for (int i = 0; i < 2; ++i) {
    xi[i] = AdamState(AdamConfig{.learning_rate = critic_lr}, {ParamView{"xi", as_span(critic.xi[i])}});
    head[i] = AdamState(AdamConfig{.learning_rate = repr_lr}, critic.head[i].net().parameters());
  }
}

CriticStats critic_update(const envs::TransitionBatch& batch, Critic& critic, const diffusion::ScorePair& sp,
                          const Policy& policy, double gamma, double temperature, const Vector& bonus,
                          CriticOptimizer& opt, Rng& rng, Exec exec) {
  const Batch next_eps = rng.normal_matrix(policy.action_dim(), batch.size());
  const TdTargets targets = td_targets(critic, sp, policy, batch, gamma, temperature, bonus, next_eps, exec);
  const Batch psi = sp.psi_features(batch.s, batch.a, exec);
  CriticLoss loss = critic_loss(critic, psi, targets.y, exec);
  for (int i = 0; i < 2; ++i) {
    opt.xi[i].step({ParamView{"xi", as_span(critic.xi[i])}}, {ParamView{"xi", as_span(loss.dxi[i])}});
    opt.head[i].step(critic.head[i].net().parameters(), loss.dhead[i].views());
  }
  return {loss.loss, targets.y.mean()};
}

void soft_update(Vector& target, const Vector& online, double tau) {
  if (target.size() != online.size()) throw DimensionError("soft_update: size mismatch");
  target = (1.0 - tau) * target + tau * online;
}

void soft_update(Mlp& target, const Mlp& online, double tau) { blend_into(target, online, tau); }

void soft_update(Critic& critic, double tau) {
  for (int i = 0; i < 2; ++i) {
    soft_update(critic.target_xi[i], critic.xi[i], tau);
    soft_update(critic.target_head[i].net(), critic.head[i].net(), tau);
  }
}

Vector CriticActionValue::values(const Batch& obs, const Batch& actions) const {
  const Batch psi = sp_.psi_features(obs, actions, exec_);
  return q_values(critic_, psi, QWhich::online1, exec_).cwiseMin(q_values(critic_, psi, QWhich::online2, exec_));
}

Vector CriticActionValue::values_and_action_grad(const Batch& obs, const Batch& actions, Batch& grad) const {
  const Eigen::Index n = obs.cols();
  const MlpTape psi_tape = sp_.psi.forward(stack_rows(obs, actions), exec_);
  std::array<Vector, 2> q;
  std::array<Batch, 2> dpsi;
  for (int i = 0; i < 2; ++i) {
    const MlpTape tape = critic_.head[i].net().forward(psi_tape.output, exec_);
    q[i] = tape.output.transpose() * critic_.xi[i];
    dpsi[i] = critic_.head[i].net().input_gradient(tape, critic_.xi[i] * Vector::Ones(n).transpose(), exec_);
  }
  Vector out(n);
  Batch dmin(psi_tape.output.rows(), n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const int i = q[1](k) < q[0](k) ? 1 : 0;
    out(k) = q[i](k);
    dmin.col(k) = dpsi[i].col(k);
  }
  const Batch dinput = sp_.psi.input_gradient(psi_tape, dmin, exec_);
  grad = dinput.bottomRows(actions.rows());
  return out;
}

}  // namespace diffsr::agent
