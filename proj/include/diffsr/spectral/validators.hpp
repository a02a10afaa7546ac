#pragma once

#include <functional>
#include <vector>

#include "diffsr/spectral/rff.hpp"

namespace diffsr::spectral {

/// P(s'|s,a) ∝ exp(ψ(s,a)ᵀ ν(s')) on a bounded 1-D next-state domain, with
/// closed-form ψ and ν so the normalizer is a quadrature away.
struct EbmFactorization {
  Eigen::Index dim = 0;  // m
  std::function<Vector(double s, double a)> psi_map;
  std::function<Vector(double s_next)> nu_map;
};

struct Domain1D {
  double lo = -5.0;
  double hi = 5.0;
  int points = 2001;  // odd, for Simpson's rule

  std::vector<double> grid() const;
  double spacing() const { return (hi - lo) / (points - 1); }
};

struct SpectralSample {
  double s = 0.0;
  double a = 0.0;
  double s_next = 0.0;
};

/// Composite Simpson's rule over equally spaced values (odd count).
double simpson(std::span<const double> values, double spacing);

/// Z(s,a) = ∫ exp(ψ(s,a)ᵀ ν(s')) ds' over the domain.
double partition_quadrature(const EbmFactorization& fact, double s, double a, const Domain1D& domain);

/// Worst relative error between exp(ψᵀν)/Z and the spectral form
/// e^{|ψ|²/2} k̂(ψ, ν) e^{|ν|²/2} / Z over the sample set.
double verify_spectral_identity(const EbmFactorization& fact, const RffBank& bank,
                                std::span<const SpectralSample> samples, const Domain1D& domain = {});

/// Worst relative gap between the random-feature form <ρ_ω(s,a), u> with
/// u = ∫ μ_ω(s') ds' and the quadrature Z(s,a), over the test pairs.
double partition_linear_check(const EbmFactorization& fact, const RffBank& bank,
                              std::span<const std::pair<double, double>> pairs, const Domain1D& domain = {});

/// Smooth two-dimensional fixture with |ψ|, |ν| below one.
EbmFactorization smooth_fixture();
/// ψ ≡ 0: the conditional is uniform over the domain.
EbmFactorization zero_psi_fixture();

std::vector<SpectralSample> random_samples(std::size_t n, const Domain1D& domain, Rng& rng);
std::vector<std::pair<double, double>> random_pairs(std::size_t n, Rng& rng);

}  // namespace diffsr::spectral
