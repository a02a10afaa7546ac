#pragma once

#include <vector>

#include "diffsr/numerics/linalg.hpp"
#include "diffsr/numerics/rng.hpp"

namespace diffsr::diffusion {

/// Ordered corruption levels β¹ < ... < β^T, all in (0, 1).
class NoiseSchedule {
 public:
  NoiseSchedule() = default;
  explicit NoiseSchedule(std::vector<double> betas);

  std::size_t size() const { return betas_.size(); }
  double operator[](std::size_t k) const { return betas_[k]; }
  const std::vector<double>& betas() const { return betas_; }
  double front() const { return betas_.front(); }
  double back() const { return betas_.back(); }

 private:
  std::vector<double> betas_;
};

/// Linearly spaced levels from beta_min to beta_max inclusive.
NoiseSchedule make_noise_schedule(int levels, double beta_min, double beta_max);

/// √(1-β) s' + √β ε with ε ~ N(0, I).
Vector corrupt(const Vector& s_next, double beta, Rng& rng);
Vector corrupt_with_noise(const Vector& s_next, double beta, const Vector& eps);

/// Per-sample noise level and Gaussian draw for one corrupted batch.
struct CorruptionDraws {
  std::vector<std::size_t> level;  // index into the schedule
  Vector beta;
  Batch eps;  // d x n

  Eigen::Index size() const { return beta.size(); }
};

/// Levels uniform over the schedule, one fresh ε per sample.
CorruptionDraws sample_corruption(Eigen::Index n, Eigen::Index d, const NoiseSchedule& schedule, Rng& rng);

/// Columns √(1-β_k) s'_k + √β_k ε_k.
Batch corrupt_batch(const Batch& s_next, const CorruptionDraws& draws);

}  // namespace diffsr::diffusion
