#include "diffsr/envs/tabular.hpp"

#include <algorithm>
#include <cmath>

namespace diffsr::envs {
namespace {

int sample_categorical(const Vector& p, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p(i);
    if (u < acc) return static_cast<int>(i);
  }
  // Rounding left u above the cumulative sum; take the last supported index.
  for (Eigen::Index i = p.size(); i-- > 0;)
    if (p(i) > 0.0) return static_cast<int>(i);
  return static_cast<int>(p.size() - 1);
}

}  // namespace

TabularMdp::TabularMdp(std::vector<std::vector<Vector>> transition_, Matrix reward_, Vector initial_, double gamma_)
    : transition(std::move(transition_)), reward(std::move(reward_)), initial(std::move(initial_)), gamma(gamma_) {
  validate();
}

void TabularMdp::validate() const {
  const int S = states(), A = actions();
  if (S == 0 || A == 0) throw ContractError("TabularMdp: empty state or action set");
  require_shape(reward, S, A, "TabularMdp reward");
  require_length(initial, S, "TabularMdp initial distribution");
  if (!reward.allFinite()) throw ContractError("TabularMdp: non-finite reward");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ContractError("TabularMdp: gamma must lie in [0,1)");
  for (int s = 0; s < S; ++s) {
    if (static_cast<int>(transition[s].size()) != A) throw DimensionError("TabularMdp: ragged transition tensor");
    for (int a = 0; a < A; ++a) {
      const Vector& row = transition[s][a];
      require_length(row, S, "TabularMdp transition row");
      if ((row.array() < 0.0).any() || std::abs(row.sum() - 1.0) > 1e-12)
        throw ContractError("TabularMdp: P[" + std::to_string(s) + "][" + std::to_string(a) +
                            "] is not a distribution");
    }
  }
  if ((initial.array() < 0.0).any() || std::abs(initial.sum() - 1.0) > 1e-12)
    throw ContractError("TabularMdp: initial distribution does not sum to 1");
}

int TabularMdp::sample_initial(Rng& rng) const { return sample_categorical(initial, rng); }

int TabularMdp::sample_next(int s, int a, Rng& rng) const { return sample_categorical(transition[s][a], rng); }

TabularMdp make_chain(int n, double gamma) {
  if (n < 2) throw ContractError("make_chain: need at least 2 states");
  std::vector<std::vector<Vector>> P(n, std::vector<Vector>(2, Vector::Zero(n)));
  Matrix r = Matrix::Zero(n, 2);
  for (int s = 0; s < n; ++s) {
    if (s == n - 1) {
      P[s][0](s) = 1.0;
      P[s][1](s) = 1.0;
      r(s, 0) = r(s, 1) = 1.0;
      continue;
    }
    P[s][0](std::max(s - 1, 0)) = 1.0;
    P[s][1](s + 1) = 1.0;
  }
  Vector mu = Vector::Zero(n);
  mu(0) = 1.0;
  return TabularMdp(std::move(P), std::move(r), std::move(mu), gamma);
}

TabularMdp make_grid(int width, int height, double slip, double gamma) {
  const int S = width * height;
  const int goal = S - 1;
  std::vector<std::vector<Vector>> P(S, std::vector<Vector>(4, Vector::Zero(S)));
  Matrix r = Matrix::Zero(S, 4);
  const int dx[4] = {0, 0, -1, 1};
  const int dy[4] = {-1, 1, 0, 0};
  for (int s = 0; s < S; ++s) {
    const int x = s % width, y = s / width;
    for (int a = 0; a < 4; ++a) {
      if (s == goal) {
        P[s][a](s) = 1.0;
        continue;
      }
      const int nx = std::clamp(x + dx[a], 0, width - 1);
      const int ny = std::clamp(y + dy[a], 0, height - 1);
      const int target = ny * width + nx;
      P[s][a](target) += 1.0 - slip;
      P[s][a](s) += slip;
      r(s, a) = P[s][a](goal);
    }
  }
  Vector mu = Vector::Zero(S);
  mu(0) = 1.0;
  return TabularMdp(std::move(P), std::move(r), std::move(mu), gamma);
}

TabularMdp make_random_mdp(int states, int actions, double gamma, Rng& rng) {
  std::vector<std::vector<Vector>> P(states, std::vector<Vector>(actions));
  Matrix r(states, actions);
  for (int s = 0; s < states; ++s)
    for (int a = 0; a < actions; ++a) {
      Vector row(states);
      for (int k = 0; k < states; ++k) row(k) = -std::log(1.0 - rng.uniform());
      row /= row.sum();
      // Renormalize until the sum is exactly representable as 1.
      row(states - 1) = 1.0 - (row.sum() - row(states - 1));
      P[s][a] = row;
      r(s, a) = rng.uniform();
    }
  Vector mu = Vector::Constant(states, 1.0 / states);
  mu(states - 1) = 1.0 - (mu.sum() - mu(states - 1));
  return TabularMdp(std::move(P), std::move(r), std::move(mu), gamma);
}

TabularEnv::TabularEnv(TabularMdp mdp, std::string name, int horizon) : mdp_(std::move(mdp)) {
  mdp_.validate();
  spec_.name = std::move(name);
  spec_.obs_dim = mdp_.states();
  spec_.action_dim = 1;
  spec_.action_low = Vector::Constant(1, -1.0);
  spec_.action_high = Vector::Constant(1, 1.0);
  spec_.horizon = horizon;
  spec_.gamma = mdp_.gamma;
}

Vector TabularEnv::one_hot(int s) const {
  Vector v = Vector::Zero(mdp_.states());
  v(s) = 1.0;
  return v;
}

int TabularEnv::action_index(const Vector& action) const {
  const double a = clamp_action(spec_, action)(0);
  const int n = mdp_.actions();
  return std::clamp(static_cast<int>(std::floor((a + 1.0) * 0.5 * n)), 0, n - 1);
}

Vector TabularEnv::reset(Rng& rng) {
  state_ = mdp_.sample_initial(rng);
  return one_hot(state_);
}

StepResult TabularEnv::step(const Vector& action, Rng& rng) {
  const int a = action_index(action);
  StepResult out;
  out.reward = mdp_.reward(state_, a);
  state_ = mdp_.sample_next(state_, a, rng);
  out.observation = one_hot(state_);
  return out;
}

void TabularEnv::load_state(std::span<const double> state) {
  if (state.size() != 1) throw ContractError("TabularEnv::load_state: expected 1 value");
  const int s = static_cast<int>(state[0]);
  if (s < 0 || s >= mdp_.states()) throw ContractError("TabularEnv::load_state: state out of range");
  state_ = s;
}

}  // namespace diffsr::envs
