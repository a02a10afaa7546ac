#pragma once

#include <memory>
#include <string>

#include "diffsr/envs/environment.hpp"

namespace diffsr::envs {

/// "pendulum", "lingauss", "chain", "grid", each optionally suffixed with
/// "-masked" to hide velocity coordinates. history_len > 1 stacks the last L
/// observation/action pairs into the observation.
std::unique_ptr<Environment> make_environment(const std::string& name, int history_len = 1);

bool is_known_environment(const std::string& name);

}  // namespace diffsr::envs
