#pragma once

#include "diffsr/envs/environment.hpp"

namespace diffsr::envs {

/// Torque-controlled pendulum swing-up. State (θ, θ̇), observation
/// (cos θ, sin θ, θ̇), torque in [-2, 2], 200-step episodes.
///
/// Per-step reward is 1 - (θ² + 0.1 θ̇² + 0.001 u²) / 5 with θ wrapped to
/// [-π, π): at most 1 (upright, at rest, no torque), and a near-optimal
/// episode from a random start collects roughly +170.
class Pendulum final : public Environment {
 public:
  static constexpr double kMaxSpeed = 8.0;
  static constexpr double kMaxTorque = 2.0;
  static constexpr double kDt = 0.05;
  static constexpr double kGravity = 10.0;
  static constexpr double kMass = 1.0;
  static constexpr double kLength = 1.0;
  static constexpr double kCostScale = 5.0;

  Pendulum();

  const EnvSpec& spec() const override { return spec_; }
  Vector reset(Rng& rng) override;
  StepResult step(const Vector& action, Rng& rng) override;
  std::vector<double> save_state() const override { return {theta_, theta_dot_}; }
  void load_state(std::span<const double> state) override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<Pendulum>(*this); }

  void set_state(double theta, double theta_dot);
  double theta() const { return theta_; }
  double theta_dot() const { return theta_dot_; }

  static double reward(double theta, double theta_dot, double torque);
  Vector observation() const;

 private:
  EnvSpec spec_;
  double theta_ = 0.0;
  double theta_dot_ = 0.0;
};

double wrap_angle(double theta);

}  // namespace diffsr::envs
