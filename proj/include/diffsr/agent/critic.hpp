#pragma once

#include <array>

#include "diffsr/agent/policy.hpp"
#include "diffsr/diffusion/head.hpp"
#include "diffsr/diffusion/score.hpp"
#include "diffsr/envs/transition.hpp"
#include "diffsr/numerics/adam.hpp"

namespace diffsr::agent {

/// Two linear critics Q_i(s,a) = φ_{θ_i}(s,a)ᵀ ξ_i over the shared ψ, with a
/// target copy of every (θ_i, ξ_i).
struct Critic {
  std::array<diffusion::ReprHead, 2> head;
  std::array<Vector, 2> xi;
  std::array<diffusion::ReprHead, 2> target_head;
  std::array<Vector, 2> target_xi;

  /// Independent heads, ξ = 0, targets equal to the online copies.
  static Critic create(Eigen::Index feature_dim, Eigen::Index fourier_dim, Eigen::Index repr_dim, Rng& rng);

  Eigen::Index repr_dim() const { return xi[0].size(); }
  void validate() const;
};

enum class QWhich { online1, online2, target1, target2 };

/// φ_θ(s,a)ᵀ ξ for one of the four (head, ξ) pairs.
double q_value(const Critic& critic, const diffusion::ScorePair& sp, const Vector& s, const Vector& a,
               QWhich which);
/// Batched form, given ψ(s,a) columns.
Vector q_values(const Critic& critic, const Batch& psi, QWhich which, Exec exec = Exec::parallel);

struct CriticLoss {
  double loss = 0.0;                  // mean over the two critics
  std::array<double, 2> per_critic{}; // mean squared TD error of each
  std::array<Vector, 2> dxi;
  std::array<MlpGrad, 2> dhead;
};

/// mean_k (y_k - φ_{θ_i}(ψ_k)ᵀ ξ_i)² for each critic i, with gradients with
/// respect to ξ_i and θ_i. ψ is an input here, so it receives no gradient.
CriticLoss critic_loss(const Critic& critic, const Batch& psi, const Vector& targets, Exec exec = Exec::parallel);

struct TdTargets {
  Vector y;
  Vector min_target_q;  // min_i Q̄_i(s', a')
  Vector next_log_prob;
};

/// y = r + bonus + γ (1 - done) (min_i Q̄_i(s', a') - α log π(a'|s')), with a'
/// drawn from the policy on the given noise.
TdTargets td_targets(const Critic& critic, const diffusion::ScorePair& sp, const Policy& policy,
                     const envs::TransitionBatch& batch, double gamma, double temperature, const Vector& bonus,
                     const Batch& next_eps, Exec exec = Exec::parallel);

struct CriticOptimizer {
  std::array<AdamState, 2> xi;
  std::array<AdamState, 2> head;

  CriticOptimizer() = default;
  CriticOptimizer(Critic& critic, double critic_lr, double repr_lr);
};

struct CriticStats {
  double loss = 0.0;
  double target_mean = 0.0;
};

/// One TD step on both critics: ξ_i at the critic rate, θ_i at the
/// representation rate. `bonus` is added to the rewards (empty for none).
CriticStats critic_update(const envs::TransitionBatch& batch, Critic& critic, const diffusion::ScorePair& sp,
                          const Policy& policy, double gamma, double temperature, const Vector& bonus,
                          CriticOptimizer& opt, Rng& rng, Exec exec = Exec::parallel);

/// target <- (1 - τ) target + τ online.
void soft_update(Vector& target, const Vector& online, double tau);
void soft_update(Mlp& target, const Mlp& online, double tau);
void soft_update(Critic& critic, double tau);

/// min_i Q_i(s, a) over the online critics, differentiable in a.
class CriticActionValue final : public ActionValue {
 public:
  CriticActionValue(const Critic& critic, const diffusion::ScorePair& sp, Exec exec = Exec::parallel)
      : critic_(critic), sp_(sp), exec_(exec) {}
  Vector values(const Batch& obs, const Batch& actions) const override;
  Vector values_and_action_grad(const Batch& obs, const Batch& actions, Batch& grad) const override;

 private:
  const Critic& critic_;
  const diffusion::ScorePair& sp_;
  Exec exec_;
};

}  // namespace diffsr::agent
