#include "diffsr/diffusion/schedule.hpp"

#include <cmath>

namespace diffsr::diffusion {

NoiseSchedule::NoiseSchedule(std::vector<double> betas) : betas_(std::move(betas)) {
  if (betas_.empty()) throw ConfigError("NoiseSchedule: at least one level required");
  for (std::size_t k = 0; k < betas_.size(); ++k) {
    if (!(betas_[k] > 0.0 && betas_[k] < 1.0))
      throw ConfigError("NoiseSchedule: level " + std::to_string(k) + " outside (0,1)");
    if (k > 0 && !(betas_[k] > betas_[k - 1])) throw ConfigError("NoiseSchedule: levels must strictly increase");
  }
}

NoiseSchedule make_noise_schedule(int levels, double beta_min, double beta_max) {
  if (levels < 2) throw ConfigError("noise schedule needs at least 2 levels");
  if (!(beta_min > 0.0 && beta_min < beta_max && beta_max < 1.0))
    throw ConfigError("noise schedule bounds must satisfy 0 < beta_min < beta_max < 1");
  std::vector<double> betas(static_cast<std::size_t>(levels));
  const double step = (beta_max - beta_min) / (levels - 1);
  for (int k = 0; k < levels; ++k) betas[k] = beta_min + step * k;
  betas.back() = beta_max;
  return NoiseSchedule(std::move(betas));
}

Vector corrupt_with_noise(const Vector& s_next, double beta, const Vector& eps) {
  require_length(eps, s_next.size(), "corrupt noise");
  return std::sqrt(1.0 - beta) * s_next + std::sqrt(beta) * eps;
}

Vector corrupt(const Vector& s_next, double beta, Rng& rng) {
  if (!(beta > 0.0 && beta < 1.0)) throw ContractError("corrupt: beta must lie in (0,1)");
  return corrupt_with_noise(s_next, beta, rng.normal_vector(s_next.size()));
}

CorruptionDraws sample_corruption(Eigen::Index n, Eigen::Index d, const NoiseSchedule& schedule, Rng& rng) {
  CorruptionDraws draws;
  draws.level.resize(static_cast<std::size_t>(n));
  draws.beta.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    draws.level[k] = rng.index(schedule.size());
    draws.beta(k) = schedule[draws.level[k]];
  }
  draws.eps = rng.normal_matrix(d, n);
  return draws;
}

Batch corrupt_batch(const Batch& s_next, const CorruptionDraws& draws) {
  require_same_shape(s_next, draws.eps, "corrupt_batch");
  Batch out(s_next.rows(), s_next.cols());
  for (Eigen::Index k = 0; k < s_next.cols(); ++k) {
    const double beta = draws.beta(k);
    out.col(k) = std::sqrt(1.0 - beta) * s_next.col(k) + std::sqrt(beta) * draws.eps.col(k);
  }
  return out;
}

}  // namespace diffsr::diffusion
