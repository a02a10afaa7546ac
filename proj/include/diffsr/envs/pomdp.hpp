#pragma once

#include <deque>

#include "diffsr/envs/environment.hpp"

namespace diffsr::envs {

/// Drops the velocity coordinates from an observation.
Vector mask_velocity(const Vector& obs, const std::vector<Eigen::Index>& velocity_coords);

/// The last L (observation, action) pairs ending in an observation:
/// x_h = (o_{h-L+1}, a_{h-L+1}, ..., a_{h-1}, o_h).
class HistoryWindow {
 public:
  HistoryWindow(int length, Eigen::Index obs_dim, Eigen::Index action_dim);

  int length() const { return length_; }
  Eigen::Index feature_dim() const;

  /// Start of an episode: pad with copies of o₀ and zero actions.
  Vector reset(const Vector& first_obs);
  /// Append (previous action, new observation); the oldest pair is evicted.
  Vector push(const Vector& action_prev, const Vector& new_obs);
  Vector feature() const;

  std::vector<double> save_state() const;
  void load_state(std::span<const double> state);

 private:
  int length_;
  Eigen::Index obs_dim_;
  Eigen::Index action_dim_;
  std::deque<Vector> observations_;
  std::deque<Vector> actions_;  // actions_[i] follows observations_[i]
};

inline Vector stack_history(HistoryWindow& window, const Vector& new_obs, const Vector& action_prev) {
  return window.push(action_prev, new_obs);
}

/// Masks velocities of an inner environment and optionally stacks history.
class PartialObservationEnv final : public Environment {
 public:
  PartialObservationEnv(std::unique_ptr<Environment> inner, bool mask, int history_len);
  PartialObservationEnv(const PartialObservationEnv& other);

  const EnvSpec& spec() const override { return spec_; }
  Vector reset(Rng& rng) override;
  StepResult step(const Vector& action, Rng& rng) override;
  std::vector<double> save_state() const override;
  void load_state(std::span<const double> state) override;
  std::unique_ptr<Environment> clone() const override {
    return std::make_unique<PartialObservationEnv>(*this);
  }

  const Environment& inner() const { return *inner_; }

 private:
  Vector observe(const Vector& full) const;

  std::unique_ptr<Environment> inner_;
  std::vector<Eigen::Index> mask_;
  HistoryWindow window_;
  EnvSpec spec_;
};

}  // namespace diffsr::envs
