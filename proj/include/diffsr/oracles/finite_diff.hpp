#pragma once

#include <functional>
#include <vector>

#include "diffsr/numerics/linalg.hpp"

namespace diffsr::oracles {

struct FiniteDiffReport {
  double max_relative_error = 0.0;
  std::string worst;      // "<tensor>[index]"
  std::size_t checked = 0;  // coordinates above the magnitude floor
};

inline constexpr double kFiniteDiffStep = 1e-5;
inline constexpr double kGradientFloor = 1e-8;

/// Central differences of `f` over every coordinate of `params`, compared
/// against `grads` (same layout). Coordinates where both the analytic and
/// the numerical derivative are below the floor are skipped. `f` must be
/// deterministic: freeze any randomness with common random numbers.
FiniteDiffReport finite_diff_check(const std::function<double()>& f, const std::vector<ParamView>& params,
                                   const std::vector<ParamView>& grads, double eps = kFiniteDiffStep);

}  // namespace diffsr::oracles
