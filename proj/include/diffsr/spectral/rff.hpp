#pragma once

#include "diffsr/kernels/kernels.hpp"
#include "diffsr/numerics/linalg.hpp"
#include "diffsr/numerics/rng.hpp"

namespace diffsr::spectral {

/// exp(-|x - y|² / 2).
double gaussian_kernel(const Vector& x, const Vector& y);

/// Frozen bank of N frequencies ω_i ~ N(0, I) in ℝ^m (one per row).
class RffBank {
 public:
  explicit RffBank(Matrix omegas);
  static RffBank sample(Eigen::Index features, Eigen::Index dim, Rng& rng);

  const Matrix& omegas() const { return omegas_; }
  Eigen::Index features() const { return omegas_.rows(); }
  Eigen::Index dim() const { return omegas_.cols(); }

 private:
  Matrix omegas_;
};

/// (1/√N) [cos(ω_iᵀx)]_i followed by (1/√N) [sin(ω_iᵀx)]_i.
Vector rff_features(const RffBank& bank, const Vector& x);
Batch rff_features(const RffBank& bank, const Batch& X, kernels::Exec exec);

/// <features(x), features(y)>, the Monte-Carlo estimate of k(x, y), computed
/// as the mean of cos(ω_iᵀ(x - y)). k̂(x, x) = 1 exactly.
double rff_kernel_estimate(const RffBank& bank, const Vector& x, const Vector& y);

}  // namespace diffsr::spectral
