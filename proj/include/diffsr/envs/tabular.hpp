#pragma once

#include <vector>

#include "diffsr/envs/environment.hpp"

namespace diffsr::envs {

/// Finite MDP with an explicit transition tensor.
struct TabularMdp {
  // transition[s][a] is a distribution over next states.
  std::vector<std::vector<Vector>> transition;
  Matrix reward;  // states x actions
  Vector initial;  // μ₀
  double gamma = 0.99;

  TabularMdp() = default;
  TabularMdp(std::vector<std::vector<Vector>> transition, Matrix reward, Vector initial, double gamma);

  int states() const { return static_cast<int>(transition.size()); }
  int actions() const { return transition.empty() ? 0 : static_cast<int>(transition.front().size()); }

  void validate() const;
  int sample_initial(Rng& rng) const;
  int sample_next(int s, int a, Rng& rng) const;
};

/// Deterministic chain: action 1 moves right, action 0 moves left, the last
/// state loops on itself with reward 1 for every action.
TabularMdp make_chain(int n, double gamma = 0.9);

/// w x h grid, actions {up, down, left, right}; moves succeed with
/// probability 1 - slip, otherwise the agent stays. Reward 1 on reaching the
/// far corner, which is absorbing.
TabularMdp make_grid(int width, int height, double slip = 0.1, double gamma = 0.95);

/// Random MDP with Dirichlet-like rows, used by oracle cross-checks.
TabularMdp make_random_mdp(int states, int actions, double gamma, Rng& rng);

/// Exposes a TabularMdp to continuous-action agents: observations are one-hot
/// state encodings and the 1-D action in [-1, 1] is binned into an index.
class TabularEnv final : public Environment {
 public:
  TabularEnv(TabularMdp mdp, std::string name, int horizon);

  const EnvSpec& spec() const override { return spec_; }
  Vector reset(Rng& rng) override;
  StepResult step(const Vector& action, Rng& rng) override;
  std::vector<double> save_state() const override { return {static_cast<double>(state_)}; }
  void load_state(std::span<const double> state) override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<TabularEnv>(*this); }

  const TabularMdp& mdp() const { return mdp_; }
  int state() const { return state_; }
  int action_index(const Vector& action) const;
  Vector one_hot(int s) const;

 private:
  TabularMdp mdp_;
  EnvSpec spec_;
  int state_ = 0;
};

}  // namespace diffsr::envs
