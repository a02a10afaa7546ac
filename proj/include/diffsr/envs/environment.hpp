#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "diffsr/numerics/linalg.hpp"
#include "diffsr/numerics/rng.hpp"

namespace diffsr::envs {

struct EnvSpec {
  std::string name;
  Eigen::Index obs_dim = 0;
  Eigen::Index action_dim = 0;
  Vector action_low;
  Vector action_high;
  int horizon = 0;
  double gamma = 0.99;
  /// Observation coordinates that carry velocities (masked in the POMDP variant).
  std::vector<Eigen::Index> velocity_coords;

  void validate() const;
};

struct StepResult {
  Vector observation;
  double reward = 0.0;
  bool done = false;  // true terminal state; time limits are handled by the caller
};

/// A single-threaded environment instance. Randomness comes from the Rng
/// passed in, so independent instances can run side by side.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvSpec& spec() const = 0;
  virtual Vector reset(Rng& rng) = 0;
  /// Actions outside the bounds are clamped; non-finite actions are rejected.
  virtual StepResult step(const Vector& action, Rng& rng) = 0;

  virtual std::vector<double> save_state() const = 0;
  virtual void load_state(std::span<const double> state) = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;
};

/// Validates finiteness and length, then clamps into the declared bounds.
Vector clamp_action(const EnvSpec& spec, const Vector& action);

}  // namespace diffsr::envs
