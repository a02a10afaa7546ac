#include "diffsr/exploration/bonus.hpp"

#include <algorithm>
#include <cmath>

namespace diffsr::exploration {

std::string to_string(BonusMode mode) {
  switch (mode) {
    case BonusMode::off: return "off";
    case BonusMode::elliptical: return "elliptical";
    case BonusMode::kernel: return "kernel";
  }
  return "off";
}

BonusMode parse_bonus_mode(const std::string& name) {
  if (name == "off") return BonusMode::off;
  if (name == "elliptical") return BonusMode::elliptical;
  if (name == "kernel") return BonusMode::kernel;
  throw ConfigError("bonus must be one of off, elliptical, kernel (got '" + name + "')");
}

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ConfigError("bonus_lambda must be positive, got " + std::to_string(lambda));
}

void check_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw PoisonError(std::string(what) + ": non-finite feature vector");
}

}  // namespace

EllipticalBonus::EllipticalBonus(Eigen::Index dim, double lambda) : lambda_(lambda) {
  if (dim < 1) throw DimensionError("EllipticalBonus: dimension must be positive");
  check_lambda(lambda);
  loaded_ = lambda * Matrix::Identity(dim, dim);
  inverse_ = Matrix::Identity(dim, dim) / lambda;
}

double EllipticalBonus::bonus(const Vector& phi) const {
  require_length(phi, dim(), "elliptical_bonus");
  check_finite(phi, "elliptical_bonus");
  return std::max(0.0, phi.dot(inverse_ * phi));
}

Vector EllipticalBonus::bonus(const Batch& phis, kernels::Exec exec) const {
  if (phis.rows() != dim()) throw DimensionError("elliptical_bonus: batch has " + shape_string(phis));
  if (!phis.allFinite()) throw PoisonError("elliptical_bonus: non-finite feature vector");
  Vector out;
  kernels::quadratic_forms(exec, inverse_, phis, out);
  return out.cwiseMax(0.0);
}

void EllipticalBonus::update(const Vector& phi) {
  require_length(phi, dim(), "update_covariance");
  check_finite(phi, "update_covariance");
  ++count_;
  if (phi.squaredNorm() == 0.0) return;
  loaded_.noalias() += phi * phi.transpose();
  const Vector u = inverse_ * phi;
  const double denom = 1.0 + phi.dot(u);
  if (!(denom > 0.0) || !std::isfinite(denom)) {
    rebuild();
    return;
  }
  inverse_.noalias() -= (u / denom) * u.transpose();
  inverse_ = 0.5 * (inverse_ + inverse_.transpose()).eval();
  if (!(inverse_.diagonal().array() > 0.0).all()) rebuild();
}

void EllipticalBonus::rebuild() {
  ++rebuilds_;
  Eigen::LLT<Matrix> llt(loaded_);
  if (llt.info() != Eigen::Success) throw NumericError("update_covariance: covariance lost positive definiteness");
  inverse_ = llt.solve(Matrix::Identity(dim(), dim()));
  inverse_ = 0.5 * (inverse_ + inverse_.transpose()).eval();
}

void EllipticalBonus::save(TensorArchive& ar, const std::string& prefix) const {
  ar.put(prefix + ".loaded", loaded_);
  ar.put(prefix + ".inverse", inverse_);
  ar.put(prefix + ".scalars", std::vector<std::int64_t>{3},
         std::vector<double>{lambda_, static_cast<double>(count_), static_cast<double>(rebuilds_)});
}

void EllipticalBonus::load(const TensorArchive& ar, const std::string& prefix) {
  ar.read_into(prefix + ".loaded", loaded_);
  ar.read_into(prefix + ".inverse", inverse_);
  std::vector<double> scalars(3);
  ar.read_into(prefix + ".scalars", scalars);
  lambda_ = scalars[0];
  count_ = static_cast<std::int64_t>(scalars[1]);
  rebuilds_ = static_cast<std::int64_t>(scalars[2]);
}

KernelBonus::KernelBonus(Eigen::Index dim, double lambda, std::size_t cap)
    : dim_(dim), lambda_(lambda), cap_(cap), points_(dim, 0) {
  if (dim < 1) throw DimensionError("KernelBonus: dimension must be positive");
  check_lambda(lambda);
  if (cap < 1) throw ConfigError("kernel_cap must be at least 1");
}

void KernelBonus::factorize() const {
  if (!stale_) return;
  Matrix gram;
  kernels::gaussian_gram(kernels::Exec::parallel, points_, points_, gram);
  const Eigen::Index n = gram.rows();
  auto factor = [&](double lambda) {
    chol_.compute(gram + lambda * Matrix::Identity(n, n));
    return chol_.info() == Eigen::Success && (chol_.vectorD().array() > 0.0).all();
  };
  if (!factor(lambda_)) {
    if (!factor(10.0 * lambda_))
      throw PoisonError("kernel_bonus: Gram factorization failed after raising lambda to " +
                        std::to_string(10.0 * lambda_));
  }
  stale_ = false;
}

double KernelBonus::bonus(const Vector& psi) const {
  require_length(psi, dim_, "kernel_bonus");
  return bonus(Batch(psi), kernels::Exec::serial)(0);
}

Vector KernelBonus::bonus(const Batch& psis, kernels::Exec exec) const {
  if (psis.rows() != dim_) throw DimensionError("kernel_bonus: batch has " + shape_string(psis));
  if (!psis.allFinite()) throw PoisonError("kernel_bonus: non-finite feature vector");
  if (points_.cols() == 0) return Vector::Ones(psis.cols());
  factorize();
  Matrix cross;  // stored x queries
  kernels::gaussian_gram(exec, points_, psis, cross);
  const Matrix solved = chol_.solve(cross);
  Vector out(psis.cols());
  for (Eigen::Index k = 0; k < psis.cols(); ++k)
    out(k) = std::clamp(1.0 - cross.col(k).dot(solved.col(k)), 0.0, 1.0);
  return out;
}

void KernelBonus::add(const Vector& psi, Rng& rng) {
  require_length(psi, dim_, "kernel_bonus add");
  check_finite(psi, "kernel_bonus add");
  ++offered_;
  if (size() < cap_) {
    points_.conservativeResize(Eigen::NoChange, points_.cols() + 1);
    points_.col(points_.cols() - 1) = psi;
    stale_ = true;
    return;
  }
  const std::size_t slot = rng.index(static_cast<std::size_t>(offered_));
  if (slot < cap_) {
    points_.col(static_cast<Eigen::Index>(slot)) = psi;
    stale_ = true;
  }
}

void KernelBonus::save(TensorArchive& ar, const std::string& prefix) const {
  ar.put(prefix + ".points", {dim_, static_cast<std::int64_t>(points_.cols())}, as_span(points_));
  ar.put(prefix + ".scalars", std::vector<std::int64_t>{3},
         std::vector<double>{lambda_, static_cast<double>(cap_), static_cast<double>(offered_)});
}

void KernelBonus::load(const TensorArchive& ar, const std::string& prefix) {
  const auto& entry = ar.get(prefix + ".points");
  if (entry.shape.size() != 2 || entry.shape[0] != dim_)
    throw DimensionError("kernel bonus store: checkpoint dimension does not match");
  points_ = Eigen::Map<const Matrix>(entry.values.data(), dim_, entry.shape[1]);
  std::vector<double> scalars(3);
  ar.read_into(prefix + ".scalars", scalars);
  lambda_ = scalars[0];
  cap_ = static_cast<std::size_t>(scalars[1]);
  offered_ = static_cast<std::int64_t>(scalars[2]);
  stale_ = true;
}

BonusState BonusState::off() { return BonusState(); }

BonusState BonusState::elliptical(Eigen::Index repr_dim, double lambda) {
  BonusState s;
  s.mode_ = BonusMode::elliptical;
  s.ellipse_ = EllipticalBonus(repr_dim, lambda);
  return s;
}

BonusState BonusState::kernel(Eigen::Index feature_dim, double lambda, std::size_t cap) {
  BonusState s;
  s.mode_ = BonusMode::kernel;
  s.kernel_ = KernelBonus(feature_dim, lambda, cap);
  return s;
}

void BonusState::save(TensorArchive& ar) const {
  if (mode_ == BonusMode::elliptical) ellipse_.save(ar, "bonus.elliptical");
  if (mode_ == BonusMode::kernel) kernel_.save(ar, "bonus.kernel");
}

void BonusState::load(const TensorArchive& ar) {
  if (mode_ == BonusMode::elliptical) ellipse_.load(ar, "bonus.elliptical");
  if (mode_ == BonusMode::kernel) kernel_.load(ar, "bonus.kernel");
}

double elliptical_bonus(const BonusState& state, const Vector& phi) {
  if (state.mode() != BonusMode::elliptical) throw ContractError("elliptical_bonus: state is not in elliptical mode");
  return state.ellipse().bonus(phi);
}

void update_covariance(BonusState& state, const Vector& phi) {
  if (state.mode() != BonusMode::elliptical) throw ContractError("update_covariance: state is not in elliptical mode");
  state.ellipse().update(phi);
}

double kernel_bonus(const BonusState& state, const Vector& psi) {
  if (state.mode() != BonusMode::kernel) throw ContractError("kernel_bonus: state is not in kernel mode");
  return state.kernel_store().bonus(psi);
}

}  // namespace diffsr::exploration
