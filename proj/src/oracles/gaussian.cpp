#include "diffsr/oracles/gaussian.hpp"

#include <cmath>

namespace diffsr::oracles {

Vector analytic_score_gaussian(const envs::LinearGaussianMdp& env, const Vector& s, const Vector& a,
                               const Vector& s_tilde, double beta) {
  const Vector mean = env.A() * s + env.B() * a;
  require_length(s_tilde, mean.size(), "analytic_score_gaussian");
  const double var0 = env.sigma0() * env.sigma0();
  const double var = (1.0 - beta) * var0 + beta;
  return -(s_tilde - std::sqrt(1.0 - beta) * mean) / var;
}

Vector posterior_mean_gaussian(const envs::LinearGaussianMdp& env, const Vector& s, const Vector& a,
                               const Vector& s_tilde, double beta) {
  const Vector mean = env.A() * s + env.B() * a;
  require_length(s_tilde, mean.size(), "posterior_mean_gaussian");
  const double var0 = env.sigma0() * env.sigma0();
  return (var0 * std::sqrt(1.0 - beta) * s_tilde + beta * mean) / ((1.0 - beta) * var0 + beta);
}

double diff_loss_floor_gaussian(const envs::LinearGaussianMdp& env, double beta) {
  const double var0 = env.sigma0() * env.sigma0();
  const double d = static_cast<double>(env.state_dim());
  return (1.0 - beta) * d * beta * var0 / (beta + (1.0 - beta) * var0);
}

}  // namespace diffsr::oracles
