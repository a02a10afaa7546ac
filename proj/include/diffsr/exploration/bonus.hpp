#pragma once

#include <cstdint>
#include <string>

#include "diffsr/kernels/kernels.hpp"
#include "diffsr/numerics/archive.hpp"
#include "diffsr/numerics/linalg.hpp"
#include "diffsr/numerics/rng.hpp"

namespace diffsr::exploration {

enum class BonusMode { off, elliptical, kernel };

std::string to_string(BonusMode mode);
BonusMode parse_bonus_mode(const std::string& name);

/// b(φ) = φᵀ (Σ φᵢφᵢᵀ + λI)⁻¹ φ with the inverse kept up to date by
/// Sherman–Morrison. The loaded matrix A itself is kept too so the inverse can
/// be rebuilt when a rank-1 update loses positive definiteness.
class EllipticalBonus {
 public:
  EllipticalBonus() = default;
  EllipticalBonus(Eigen::Index dim, double lambda);

  Eigen::Index dim() const { return inverse_.rows(); }
  double lambda() const { return lambda_; }
  std::int64_t count() const { return count_; }
  std::int64_t rebuilds() const { return rebuilds_; }
  const Matrix& inverse() const { return inverse_; }
  const Matrix& loaded() const { return loaded_; }

  double bonus(const Vector& phi) const;
  Vector bonus(const Batch& phis, kernels::Exec exec = kernels::Exec::parallel) const;
  void update(const Vector& phi);
  /// Direct inversion of A by Cholesky.
  void rebuild();

  void save(TensorArchive& ar, const std::string& prefix) const;
  void load(const TensorArchive& ar, const std::string& prefix);

 private:
  double lambda_ = 1.0;
  Matrix loaded_;   // Σ φφᵀ + λI
  Matrix inverse_;  // its inverse
  std::int64_t count_ = 0;
  std::int64_t rebuilds_ = 0;
};

/// b(ψ) = 1 - k(ψ)ᵀ (K + λI)⁻¹ k(ψ) with the Gaussian kernel on stored ψ
/// vectors. The store is capped; once full, reservoir sampling keeps a
/// uniform subset of everything offered.
class KernelBonus {
 public:
  KernelBonus() = default;
  KernelBonus(Eigen::Index dim, double lambda, std::size_t cap);

  Eigen::Index dim() const { return dim_; }
  double lambda() const { return lambda_; }
  std::size_t size() const { return static_cast<std::size_t>(points_.cols()); }
  std::size_t cap() const { return cap_; }
  std::int64_t offered() const { return offered_; }
  const Batch& points() const { return points_; }

  double bonus(const Vector& psi) const;
  Vector bonus(const Batch& psis, kernels::Exec exec = kernels::Exec::parallel) const;
  void add(const Vector& psi, Rng& rng);

  void save(TensorArchive& ar, const std::string& prefix) const;
  void load(const TensorArchive& ar, const std::string& prefix);

 private:
  void factorize() const;

  Eigen::Index dim_ = 0;
  double lambda_ = 1.0;
  std::size_t cap_ = 4096;
  Batch points_;
  std::int64_t offered_ = 0;

  mutable bool stale_ = true;
  mutable Eigen::LDLT<Matrix> chol_;
};

/// The exploration state of a run: one of the two bonuses, or nothing.
class BonusState {
 public:
  BonusState() = default;
  static BonusState off();
  static BonusState elliptical(Eigen::Index repr_dim, double lambda);
  static BonusState kernel(Eigen::Index feature_dim, double lambda, std::size_t cap);

  BonusMode mode() const { return mode_; }
  EllipticalBonus& ellipse() { return ellipse_; }
  const EllipticalBonus& ellipse() const { return ellipse_; }
  KernelBonus& kernel_store() { return kernel_; }
  const KernelBonus& kernel_store() const { return kernel_; }

  void save(TensorArchive& ar) const;
  void load(const TensorArchive& ar);

 private:
  BonusMode mode_ = BonusMode::off;
  EllipticalBonus ellipse_;
  KernelBonus kernel_;
};

double elliptical_bonus(const BonusState& state, const Vector& phi);
void update_covariance(BonusState& state, const Vector& phi);
double kernel_bonus(const BonusState& state, const Vector& psi);

}  // namespace diffsr::exploration
