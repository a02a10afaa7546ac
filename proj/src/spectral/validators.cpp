#include "diffsr/spectral/validators.hpp"

#include <algorithm>
#include <cmath>

namespace diffsr::spectral {

std::vector<double> Domain1D::grid() const {
  if (points < 3 || points % 2 == 0) throw NumericError("Domain1D: Simpson's rule needs an odd point count >= 3");
  if (!(hi > lo)) throw NumericError("Domain1D: empty interval");
  std::vector<double> g(static_cast<std::size_t>(points));
  const double h = spacing();
  for (int i = 0; i < points; ++i) g[i] = lo + h * i;
  g.back() = hi;
  return g;
}

double simpson(std::span<const double> values, double spacing) {
  const std::size_t n = values.size();
  if (n < 3 || n % 2 == 0) throw NumericError("simpson: need an odd number of points >= 3");
  double acc = values.front() + values.back();
  for (std::size_t i = 1; i + 1 < n; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * values[i];
  return acc * spacing / 3.0;
}

double partition_quadrature(const EbmFactorization& fact, double s, double a, const Domain1D& domain) {
  const Vector psi = fact.psi_map(s, a);
  const std::vector<double> grid = domain.grid();
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = std::exp(psi.dot(fact.nu_map(grid[i])));
  const double z = simpson(values, domain.spacing());
  if (!std::isfinite(z) || z <= 0.0) throw NumericError("partition_quadrature: Z is not a positive finite number");
  return z;
}

double verify_spectral_identity(const EbmFactorization& fact, const RffBank& bank,
                                std::span<const SpectralSample> samples, const Domain1D& domain) {
  if (bank.dim() != fact.dim) throw DimensionError("verify_spectral_identity: bank dimension mismatch");
  double worst = 0.0;
  for (const SpectralSample& x : samples) {
    const Vector psi = fact.psi_map(x.s, x.a);
    const Vector nu = fact.nu_map(x.s_next);
    const double z = partition_quadrature(fact, x.s, x.a, domain);
    const double exact = std::exp(psi.dot(nu)) / z;
    const double spectral = std::exp(0.5 * psi.squaredNorm()) * rff_kernel_estimate(bank, psi, nu) *
                            std::exp(0.5 * nu.squaredNorm()) / z;
    worst = std::max(worst, std::abs(spectral - exact) / exact);
  }
  return worst;
}

double partition_linear_check(const EbmFactorization& fact, const RffBank& bank,
                              std::span<const std::pair<double, double>> pairs, const Domain1D& domain) {
  if (bank.dim() != fact.dim) throw DimensionError("partition_linear_check: bank dimension mismatch");
  const std::vector<double> grid = domain.grid();
  const Eigen::Index n_freq = bank.features();
  const auto n_grid = static_cast<Eigen::Index>(grid.size());

  // u_ω = ∫ μ_ω(s') ds' split into its cosine and sine parts.
  Matrix nu(fact.dim, n_grid);
  Vector lift(n_grid);
  for (Eigen::Index g = 0; g < n_grid; ++g) {
    nu.col(g) = fact.nu_map(grid[g]);
    lift(g) = std::exp(0.5 * nu.col(g).squaredNorm());
  }
  const Matrix proj = bank.omegas() * nu;  // N x grid
  Vector u_cos(n_freq), u_sin(n_freq);
  std::vector<double> row_cos(grid.size()), row_sin(grid.size());
  for (Eigen::Index i = 0; i < n_freq; ++i) {
    for (Eigen::Index g = 0; g < n_grid; ++g) {
      row_cos[g] = std::cos(proj(i, g)) * lift(g);
      row_sin[g] = std::sin(proj(i, g)) * lift(g);
    }
    u_cos(i) = simpson(row_cos, domain.spacing());
    u_sin(i) = simpson(row_sin, domain.spacing());
  }

  double worst = 0.0;
  for (const auto& [s, a] : pairs) {
    const Vector psi = fact.psi_map(s, a);
    const Vector w = bank.omegas() * psi;
    // <ρ_ω, u> = e^{|ψ|²/2} E_ω[cos(ωᵀψ) u_cos + sin(ωᵀψ) u_sin]
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n_freq; ++i) acc += std::cos(w(i)) * u_cos(i) + std::sin(w(i)) * u_sin(i);
    const double z_features = std::exp(0.5 * psi.squaredNorm()) * acc / static_cast<double>(n_freq);
    const double z = partition_quadrature(fact, s, a, domain);
    worst = std::max(worst, std::abs(z_features - z) / z);
  }
  return worst;
}

EbmFactorization smooth_fixture() {
  EbmFactorization f;
  f.dim = 2;
  f.psi_map = [](double s, double a) {
    Vector v(2);
    v << 0.5 * std::tanh(s + a), 0.3 * std::cos(s - a);
    return v;
  };
  f.nu_map = [](double s_next) {
    Vector v(2);
    v << 0.4 * std::sin(s_next), 0.3 * std::tanh(0.5 * s_next);
    return v;
  };
  return f;
}

EbmFactorization zero_psi_fixture() {
  EbmFactorization f = smooth_fixture();
  f.psi_map = [](double, double) { return Vector(Vector::Zero(2)); };
  return f;
}

std::vector<SpectralSample> random_samples(std::size_t n, const Domain1D& domain, Rng& rng) {
  std::vector<SpectralSample> out(n);
  for (auto& x : out) x = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(domain.lo, domain.hi)};
  return out;
}

std::vector<std::pair<double, double>> random_pairs(std::size_t n, Rng& rng) {
  std::vector<std::pair<double, double>> out(n);
  for (auto& p : out) p = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
  return out;
}

}  // namespace diffsr::spectral
