#pragma once

#include "diffsr/diffusion/score.hpp"
#include "diffsr/numerics/mlp.hpp"

namespace diffsr::diffusion {

/// φ_θ(ψ) = elu(W₂ sin(W₁ ψ)), with W₁ of shape F x m and W₂ of shape d_φ x F.
/// Stored as a bias-free two-layer Mlp so the shared kernels do the work.
class ReprHead {
 public:
  ReprHead() = default;
  explicit ReprHead(Mlp net);

  /// W₁ ~ N(0, I) like random Fourier frequencies, W₂ ~ U(±1/√F).
  static ReprHead create(Eigen::Index feature_dim, Eigen::Index fourier_dim, Eigen::Index repr_dim, Rng& rng);

  const Matrix& W1() const { return net_.layers()[0].weight; }
  const Matrix& W2() const { return net_.layers()[1].weight; }
  Matrix& W1() { return net_.layers()[0].weight; }
  Matrix& W2() { return net_.layers()[1].weight; }

  Eigen::Index input_dim() const { return W1().cols(); }
  Eigen::Index repr_dim() const { return W2().rows(); }

  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }

  Batch apply(const Batch& psi, Exec exec = Exec::parallel) const { return net_.evaluate(psi, exec); }

 private:
  Mlp net_;
};

/// φ_θ(s, a) through the ψ network of `sp`.
Vector phi(const ReprHead& head, const ScorePair& sp, const Vector& s, const Vector& a);

}  // namespace diffsr::diffusion
