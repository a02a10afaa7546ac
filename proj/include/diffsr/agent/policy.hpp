#pragma once

#include <vector>

#include "diffsr/numerics/adam.hpp"
#include "diffsr/numerics/mlp.hpp"

namespace diffsr::agent {

inline constexpr double kLogStdMin = -10.0;
inline constexpr double kLogStdMax = 2.0;

/// Reparameterized draw from the squashed Gaussian, with everything the
/// gradient needs.
struct PolicySample {
  MlpTape tape;
  Batch mean;      // μ
  Batch log_std;   // clamped log σ
  Batch clamped;   // 1 where the raw log-std sat outside the clamp
  Batch eps;       // ε
  Batch pre;       // u = μ + σ ε
  Batch action;    // center + half ⊙ tanh(u)
  Vector log_prob; // log π(a | s)
};

/// Diagonal Gaussian over pre-squash actions, squashed by tanh into the
/// action box. The network emits [μ; raw log σ].
class Policy {
 public:
  Policy() = default;
  Policy(Mlp net, Vector action_low, Vector action_high);

  static Policy create(Eigen::Index obs_dim, const Vector& action_low, const Vector& action_high,
                       const std::vector<Eigen::Index>& hidden, Rng& rng);

  Eigen::Index obs_dim() const { return net_.input_dim(); }
  Eigen::Index action_dim() const { return center_.size(); }
  const Vector& center() const { return center_; }
  const Vector& half() const { return half_; }
  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }

  PolicySample sample(const Batch& obs, const Batch& eps, Exec exec = Exec::parallel) const;
  PolicySample sample(const Batch& obs, Rng& rng, Exec exec = Exec::parallel) const;

  Vector act(const Vector& obs, Rng& rng) const;
  /// center + half ⊙ tanh(μ): the evaluation action.
  Vector act_deterministic(const Vector& obs) const;

 private:
  Mlp net_;
  Vector center_;
  Vector half_;
};

/// log(1 - tanh²u), accurate for large |u|.
double log_one_minus_tanh_sq(double u);

/// Q(s, a) and its action gradient, as the actor sees it.
class ActionValue {
 public:
  virtual ~ActionValue() = default;
  virtual Vector values(const Batch& obs, const Batch& actions) const = 0;
  virtual Vector values_and_action_grad(const Batch& obs, const Batch& actions, Batch& grad) const = 0;
};

struct ActorLoss {
  double loss = 0.0;
  double entropy = 0.0;  // mean of -log π
  MlpGrad grad;
};

/// mean_k [α log π(a_k|s_k) - Q(s_k, a_k)] with a_k reparameterized on the
/// given noise, and its exact gradient with respect to the policy network.
ActorLoss actor_loss(const Policy& policy, const Batch& obs, const Batch& eps, const ActionValue& q,
                     double temperature, Exec exec = Exec::parallel);

/// One Adam step on actor_loss with fresh noise.
ActorLoss actor_update(Policy& policy, AdamState& opt, const Batch& obs, const ActionValue& q, double temperature,
                       Rng& rng, Exec exec = Exec::parallel);

}  // namespace diffsr::agent
