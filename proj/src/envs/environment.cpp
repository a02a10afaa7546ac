#include "diffsr/envs/environment.hpp"

#include <cmath>

namespace diffsr::envs {

void EnvSpec::validate() const {
  if (obs_dim <= 0 || action_dim <= 0) throw ContractError("EnvSpec " + name + ": dimensions must be positive");
  require_length(action_low, action_dim, "EnvSpec action_low");
  require_length(action_high, action_dim, "EnvSpec action_high");
  if (!action_low.allFinite() || !action_high.allFinite() || (action_low.array() >= action_high.array()).any())
    throw ContractError("EnvSpec " + name + ": action bounds must be finite with low < high");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ContractError("EnvSpec " + name + ": gamma must lie in [0,1)");
  if (horizon <= 0) throw ContractError("EnvSpec " + name + ": horizon must be positive");
}

Vector clamp_action(const EnvSpec& spec, const Vector& action) {
  require_length(action, spec.action_dim, spec.name + " action");
  if (!action.allFinite()) throw ContractError(spec.name + ": non-finite action");
  return action.cwiseMax(spec.action_low).cwiseMin(spec.action_high);
}

}  // namespace diffsr::envs
