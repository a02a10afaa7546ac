#include "diffsr/agent/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace diffsr::agent {

double log_one_minus_tanh_sq(double u) {
  const double x = -2.0 * u;
  const double softplus = x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  return 2.0 * (std::numbers::ln2 - u - softplus);
}

Policy::Policy(Mlp net, Vector action_low, Vector action_high) : net_(std::move(net)) {
  if (action_low.size() != action_high.size() || action_low.size() < 1)
    throw DimensionError("Policy: action bounds disagree");
  if (!((action_high - action_low).array() > 0.0).all() || !action_low.allFinite() || !action_high.allFinite())
    throw ContractError("Policy: action bounds must be finite with low < high");
  if (net_.output_dim() != 2 * action_low.size())
    throw DimensionError("Policy: network must emit mean and log-std for every action coordinate");
  center_ = 0.5 * (action_high + action_low);
  half_ = 0.5 * (action_high - action_low);
}

Policy Policy::create(Eigen::Index obs_dim, const Vector& action_low, const Vector& action_high,
                      const std::vector<Eigen::Index>& hidden, Rng& rng) {
  Mlp net = Mlp::create(obs_dim, hidden, 2 * action_low.size(), Activation::relu, rng);
  return Policy(std::move(net), action_low, action_high);
}

PolicySample Policy::sample(const Batch& obs, const Batch& eps, Exec exec) const {
  const Eigen::Index da = action_dim();
  const Eigen::Index n = obs.cols();
  require_shape(eps, da, n, "policy noise");
  PolicySample out;
  out.tape = net_.forward(obs, exec);
  const Batch& raw = out.tape.output;
  out.mean = raw.topRows(da);
  out.log_std.resize(da, n);
  out.clamped.resize(da, n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index j = 0; j < da; ++j) {
      const double r = raw(da + j, k);
      out.log_std(j, k) = std::clamp(r, kLogStdMin, kLogStdMax);
      out.clamped(j, k) = (r < kLogStdMin || r > kLogStdMax) ? 1.0 : 0.0;
    }
  out.eps = eps;
  out.pre = out.mean + (out.log_std.array().exp() * eps.array()).matrix();
  out.action.resize(da, n);
  out.log_prob.resize(n);
  const double log_norm = 0.5 * std::log(2.0 * std::numbers::pi);
  for (Eigen::Index k = 0; k < n; ++k) {
    double lp = 0.0;
    for (Eigen::Index j = 0; j < da; ++j) {
      const double u = out.pre(j, k);
      out.action(j, k) = center_(j) + half_(j) * std::tanh(u);
      lp += -0.5 * eps(j, k) * eps(j, k) - out.log_std(j, k) - log_norm - std::log(half_(j)) -
            log_one_minus_tanh_sq(u);
    }
    out.log_prob(k) = lp;
  }
  if (!out.action.allFinite() || !out.log_prob.allFinite()) throw PoisonError("policy: non-finite action sample");
  return out;
}

PolicySample Policy::sample(const Batch& obs, Rng& rng, Exec exec) const {
  return sample(obs, rng.normal_matrix(action_dim(), obs.cols()), exec);
}

Vector Policy::act(const Vector& obs, Rng& rng) const {
  require_length(obs, obs_dim(), "policy observation");
  return sample(Batch(obs), rng, Exec::serial).action.col(0);
}

Vector Policy::act_deterministic(const Vector& obs) const {
  require_length(obs, obs_dim(), "policy observation");
  const Batch raw = net_.evaluate(Batch(obs), Exec::serial);
  return center_ + half_.cwiseProduct(raw.col(0).head(action_dim()).array().tanh().matrix());
}

ActorLoss actor_loss(const Policy& policy, const Batch& obs, const Batch& eps, const ActionValue& q,
                     double temperature, Exec exec) {
  const Eigen::Index n = obs.cols();
  if (n == 0) throw ContractError("actor_update: empty batch");
  const Eigen::Index da = policy.action_dim();
  const PolicySample ps = policy.sample(obs, eps, exec);
  Batch dq;
  const Vector qv = q.values_and_action_grad(obs, ps.action, dq);
  require_shape(dq, da, n, "actor_update action gradient");

  ActorLoss out;
  out.loss = (temperature * ps.log_prob - qv).mean();
  out.entropy = -ps.log_prob.mean();

  const double inv_n = 1.0 / static_cast<double>(n);
  Batch draw(2 * da, n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index j = 0; j < da; ++j) {
      const double t = std::tanh(ps.pre(j, k));
      const double sigma_eps = std::exp(ps.log_std(j, k)) * ps.eps(j, k);
      // dL/du: α·2tanh(u) from the log-det term, -dQ/da · half · (1 - tanh²u) from the critic.
      const double du = temperature * 2.0 * t - dq(j, k) * policy.half()(j) * (1.0 - t * t);
      draw(j, k) = inv_n * du;
      draw(da + j, k) = ps.clamped(j, k) != 0.0 ? 0.0 : inv_n * (-temperature + du * sigma_eps);
    }
  out.grad = policy.net().backward(ps.tape, draw, nullptr, exec);
  return out;
}

ActorLoss actor_update(Policy& policy, AdamState& opt, const Batch& obs, const ActionValue& q, double temperature,
                       Rng& rng, Exec exec) {
  const Batch eps = rng.normal_matrix(policy.action_dim(), obs.cols());
  ActorLoss out = actor_loss(policy, obs, eps, q, temperature, exec);
  opt.step(policy.net().parameters(), out.grad.views());
  return out;
}

}  // namespace diffsr::agent
