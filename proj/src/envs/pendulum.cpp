#include "diffsr/envs/pendulum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace diffsr::envs {

double wrap_angle(double theta) {
  const double two_pi = 2.0 * std::numbers::pi;
  double t = std::fmod(theta + std::numbers::pi, two_pi);
  if (t < 0.0) t += two_pi;
  return t - std::numbers::pi;
}

Pendulum::Pendulum() {
  spec_.name = "pendulum";
  spec_.obs_dim = 3;
  spec_.action_dim = 1;
  spec_.action_low = Vector::Constant(1, -kMaxTorque);
  spec_.action_high = Vector::Constant(1, kMaxTorque);
  spec_.horizon = 200;
  spec_.gamma = 0.99;
  spec_.velocity_coords = {2};
}

double Pendulum::reward(double theta, double theta_dot, double torque) {
  const double th = wrap_angle(theta);
  const double cost = th * th + 0.1 * theta_dot * theta_dot + 0.001 * torque * torque;
  return 1.0 - cost / kCostScale;
}

Vector Pendulum::observation() const {
  Vector o(3);
  o << std::cos(theta_), std::sin(theta_), theta_dot_;
  return o;
}

void Pendulum::set_state(double theta, double theta_dot) {
  theta_ = theta;
  theta_dot_ = theta_dot;
}

void Pendulum::load_state(std::span<const double> state) {
  if (state.size() != 2) throw ContractError("Pendulum::load_state: expected 2 values");
  set_state(state[0], state[1]);
}

Vector Pendulum::reset(Rng& rng) {
  theta_ = rng.uniform(-std::numbers::pi, std::numbers::pi);
  theta_dot_ = rng.uniform(-1.0, 1.0);
  return observation();
}

StepResult Pendulum::step(const Vector& action, Rng& /*rng*/) {
  const double u = clamp_action(spec_, action)(0);
  StepResult out;
  out.reward = reward(theta_, theta_dot_, u);
  const double accel =
      3.0 * kGravity / (2.0 * kLength) * std::sin(theta_) + 3.0 / (kMass * kLength * kLength) * u;
  theta_dot_ = std::clamp(theta_dot_ + accel * kDt, -kMaxSpeed, kMaxSpeed);
  theta_ = theta_ + theta_dot_ * kDt;
  out.observation = observation();
  return out;
}

}  // namespace diffsr::envs
