#include "diffsr/spectral/rff.hpp"

#include <cmath>

namespace diffsr::spectral {

double gaussian_kernel(const Vector& x, const Vector& y) {
  if (x.size() != y.size())
    throw DimensionError("gaussian_kernel: lengths " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  return std::exp(-0.5 * (x - y).squaredNorm());
}

RffBank::RffBank(Matrix omegas) : omegas_(std::move(omegas)) {
  if (omegas_.rows() < 1 || omegas_.cols() < 1) throw ContractError("RffBank: need at least one frequency");
  if (!omegas_.allFinite()) throw PoisonError("RffBank: non-finite frequency");
}

RffBank RffBank::sample(Eigen::Index features, Eigen::Index dim, Rng& rng) {
  return RffBank(rng.normal_matrix(features, dim));
}

Batch rff_features(const RffBank& bank, const Batch& X, kernels::Exec exec) {
  Batch out;
  kernels::rff_features(exec, bank.omegas(), X, out);
  return out;
}

Vector rff_features(const RffBank& bank, const Vector& x) {
  require_length(x, bank.dim(), "rff_features input");
  return rff_features(bank, Batch(x), kernels::Exec::serial).col(0);
}

double rff_kernel_estimate(const RffBank& bank, const Vector& x, const Vector& y) {
  require_length(x, bank.dim(), "rff_kernel_estimate x");
  require_length(y, bank.dim(), "rff_kernel_estimate y");
  const Vector diff = x - y;
  return (bank.omegas() * diff).array().cos().mean();
}

}  // namespace diffsr::spectral
