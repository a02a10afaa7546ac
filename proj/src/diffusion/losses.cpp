#include "diffsr/diffusion/losses.hpp"

#include <cmath>

namespace diffsr::diffusion {

DenoisingLoss denoising_loss(const ScorePair& sp, const Batch& s, const Batch& a, const Batch& s_tilde,
                             const Vector& beta, const Batch& target, Exec exec) {
  const Eigen::Index n = s.cols();
  if (n == 0) throw ContractError("diff_loss: empty batch");
  require_shape(s_tilde, sp.state_dim, n, "diff_loss corrupted states");
  require_shape(target, sp.state_dim, n, "diff_loss target");
  require_length(beta, n, "diff_loss levels");

  const MlpTape psi_tape = sp.psi.forward(stack_rows(s, a), exec);
  const MlpTape zeta_tape = sp.zeta.forward(zeta_input(s_tilde, beta), exec);
  Batch score;
  kernels::bilinear_contract(exec, psi_tape.output, zeta_tape.output, sp.state_dim, score);

  Batch residual = s_tilde + score * beta.asDiagonal() - target;
  DenoisingLoss out;
  out.loss = residual.squaredNorm() / static_cast<double>(n);

  const Batch dscore = residual * (2.0 / static_cast<double>(n) * beta).asDiagonal();
  Batch dpsi, dzeta;
  kernels::bilinear_backward(exec, psi_tape.output, zeta_tape.output, dscore, dpsi, dzeta);
  out.grad.psi = sp.psi.backward(psi_tape, dpsi, nullptr, exec);
  out.grad.zeta = sp.zeta.backward(zeta_tape, dzeta, nullptr, exec);
  return out;
}

DenoisingLoss diff_loss(const ScorePair& sp, const envs::DynamicsBatch& batch, const CorruptionDraws& draws,
                        Exec exec) {
  if (batch.size() == 0) throw ContractError("diff_loss: empty batch");
  require_length(draws.beta, batch.size(), "diff_loss draws");
  const Batch s_tilde = corrupt_batch(batch.s_next, draws);
  const Vector shrink = (1.0 - draws.beta.array()).sqrt();
  const Batch target = batch.s_next * shrink.asDiagonal();
  return denoising_loss(sp, batch.s, batch.a, s_tilde, draws.beta, target, exec);
}

DenoisingLoss diff_loss(const ScorePair& sp, const envs::DynamicsBatch& batch, const NoiseSchedule& schedule,
                        Rng& rng, Exec exec) {
  if (batch.size() == 0) throw ContractError("diff_loss: empty batch");
  const CorruptionDraws draws = sample_corruption(batch.size(), batch.s_next.rows(), schedule, rng);
  return diff_loss(sp, batch, draws, exec);
}

DenoisingLoss posterior_matching_loss(const ScorePair& sp, const Batch& s, const Batch& a, const Batch& s_tilde,
                                      const Vector& beta, const Batch& posterior_mean, Exec exec) {
  require_same_shape(posterior_mean, s_tilde, "posterior_matching_loss");
  const Vector shrink = (1.0 - beta.array()).sqrt();
  return denoising_loss(sp, s, a, s_tilde, beta, posterior_mean * shrink.asDiagonal(), exec);
}

NormLoss norm_loss(const ScorePair& sp, const ReprHead& head, const Batch& s, const Batch& a, Exec exec) {
  const Eigen::Index n = s.cols();
  if (n == 0) throw ContractError("norm_loss: empty batch");
  if (head.input_dim() != sp.feature_dim) throw DimensionError("norm_loss: head and score pair disagree on m");

  const MlpTape psi_tape = sp.psi.forward(stack_rows(s, a), exec);
  const Batch& psi = psi_tape.output;
  const MlpTape head_tape = head.net().forward(psi, exec);
  const Batch& phi = head_tape.output;

  NormLoss out;
  Batch dpsi(psi.rows(), n);
  Batch dphi(phi.rows(), n);
  double total = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double psi_sq = psi.col(k).squaredNorm();
    const double phi_sq = phi.col(k).squaredNorm();
    const bool floored = phi_sq < kNormLogFloor;
    const double e = psi_sq - std::log(floored ? kNormLogFloor : phi_sq);
    total += e * e;
    const double g = 2.0 * e / static_cast<double>(n);
    dpsi.col(k) = g * 2.0 * psi.col(k);
    if (floored)
      dphi.col(k).setZero();
    else
      dphi.col(k) = -g * 2.0 / phi_sq * phi.col(k);
  }
  out.loss = total / static_cast<double>(n);

  Batch dpsi_head;
  out.head = head.net().backward(head_tape, dphi, &dpsi_head, exec);
  dpsi += dpsi_head;
  out.psi = sp.psi.backward(psi_tape, dpsi, nullptr, exec);
  return out;
}

}  // namespace diffsr::diffusion
