#pragma once

#include "diffsr/envs/environment.hpp"

namespace diffsr::envs {

/// s' ~ N(A s + B a, σ₀² I), reward -(|s|² + 0.1 |a|²). Every score of the
/// corrupted dynamics is closed-form here, which is what the oracles use.
class LinearGaussianMdp final : public Environment {
 public:
  LinearGaussianMdp(Matrix A, Matrix B, double sigma0, int horizon = 100, double gamma = 0.99);

  /// A = 0.9 Q with Q orthogonal, B scaled Gaussian; both drawn from `seed`.
  static LinearGaussianMdp standard(Eigen::Index state_dim, Eigen::Index action_dim, double sigma0,
                                    std::uint64_t seed = 7);

  const EnvSpec& spec() const override { return spec_; }
  Vector reset(Rng& rng) override;
  StepResult step(const Vector& action, Rng& rng) override;
  std::vector<double> save_state() const override;
  void load_state(std::span<const double> state) override;
  std::unique_ptr<Environment> clone() const override {
    return std::make_unique<LinearGaussianMdp>(*this);
  }

  const Matrix& A() const { return A_; }
  const Matrix& B() const { return B_; }
  double sigma0() const { return sigma0_; }
  Eigen::Index state_dim() const { return A_.rows(); }
  const Vector& state() const { return state_; }
  void set_state(const Vector& s);

  Vector mean_next(const Vector& s, const Vector& a) const;
  /// Draw s' for an arbitrary (s, a) without touching the episode state.
  Vector sample_next(const Vector& s, const Vector& a, Rng& rng) const;

 private:
  EnvSpec spec_;
  Matrix A_;
  Matrix B_;
  double sigma0_;
  Vector state_;
};

/// log N(s'; A s + B a, σ₀² I).
double transition_logdensity(const LinearGaussianMdp& env, const Vector& s, const Vector& a,
                             const Vector& s_next);

}  // namespace diffsr::envs
