#pragma once

#include <Eigen/Core>

namespace diffsr::kernels {

/// Vectorizable sin/cos with about 1 ulp error. Inputs beyond kVmathRange fall back to std::sin/cos.
inline constexpr double kVmathRange = 1.0e5;

void vsin(const double* x, double* out, Eigen::Index n);
void vcos(const double* x, double* out, Eigen::Index n);

}  // namespace diffsr::kernels
