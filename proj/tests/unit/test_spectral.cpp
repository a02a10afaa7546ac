#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "diffsr/numerics/errors.hpp"
#include "diffsr/spectral/rff.hpp"
#include "diffsr/spectral/validators.hpp"

using namespace diffsr;
using namespace diffsr::spectral;

namespace {

double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("gaussian_kernel examples") {
    const Vector x{{0.3, -1.2}};
    CHECK(gaussian_kernel(x, x) == 1.0);
    CHECK(gaussian_kernel(Vector{{1.0, 1.0}}, Vector{{0.0, 0.0}}) == doctest::Approx(0.367879).epsilon(1e-6));
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
      const Vector a = rng.normal_vector(3), b = rng.normal_vector(3);
      CHECK(gaussian_kernel(a, b) == gaussian_kernel(b, a));
    }
    CHECK_THROWS_AS(gaussian_kernel(Vector::Zero(2), Vector::Zero(3)), DimensionError);
  }

  TEST_CASE("gaussian_kernel is strictly decreasing in distance") {
    Rng rng(2);
    std::vector<double> dist(200);
    for (double& d : dist) d = 4.0 * rng.uniform();
    std::sort(dist.begin(), dist.end());
    const Vector dir = rng.normal_vector(3).normalized();
    for (std::size_t i = 1; i < dist.size(); ++i) {
      if (dist[i] == dist[i - 1]) continue;
      CHECK(gaussian_kernel(Vector::Zero(3), dist[i] * dir) < gaussian_kernel(Vector::Zero(3), dist[i - 1] * dir));
    }
  }

  TEST_CASE("rff_features examples") {
    Rng rng(3);
    const RffBank bank = RffBank::sample(64, 3, rng);
    for (int i = 0; i < 20; ++i) {
      const Vector x = 2.0 * rng.normal_vector(3);
      const Vector f = rff_features(bank, x);
      CHECK(f.size() == 128);
      CHECK(f.squaredNorm() == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(rff_kernel_estimate(bank, x, x) == 1.0);
    }
    const RffBank zero(Matrix::Zero(1, 2));
    const Vector f = rff_features(zero, Vector{{0.4, 2.0}});
    CHECK(f(0) == 1.0);
    CHECK(f(1) == 0.0);
    CHECK_THROWS_AS(rff_features(bank, Vector::Zero(2)), DimensionError);
    CHECK_THROWS_AS(RffBank(Matrix(0, 2)), ContractError);
  }

  TEST_CASE("rff estimate matches the feature inner product and stays in [-1, 1]") {
    Rng rng(4);
    const RffBank bank = RffBank::sample(32, 2, rng);
    for (int i = 0; i < 200; ++i) {
      const Vector x = 3.0 * rng.normal_vector(2), y = 3.0 * rng.normal_vector(2);
      const double est = rff_kernel_estimate(bank, x, y);
      CHECK(std::abs(est - rff_features(bank, x).dot(rff_features(bank, y))) < 1e-12);
      CHECK(est >= -1.0);
      CHECK(est <= 1.0);
    }
  }

  TEST_CASE("rff approximates the kernel at N = 4096") {
    Rng rng(5);
    const RffBank bank = RffBank::sample(4096, 2, rng);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Vector x = rng.normal_vector(2);
      const Vector y = x + rng.normal_vector(2).normalized() * (4.0 * rng.uniform());
      worst = std::max(worst, std::abs(rff_kernel_estimate(bank, x, y) - gaussian_kernel(x, y)));
    }
    CHECK(worst < 0.05);
  }

  TEST_CASE("parallel rff features match serial") {
    Rng rng(6);
    const RffBank bank = RffBank::sample(200, 4, rng);
    const Batch X = rng.normal_matrix(4, 130);
    const Batch a = rff_features(bank, X, kernels::Exec::serial);
    const Batch b = rff_features(bank, X, kernels::Exec::parallel);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("quadratic identity at the kernel peak") {
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
      const Vector psi = rng.normal_vector(3), nu = rng.normal_vector(3);
      const double lhs = std::exp(psi.dot(nu));
      const double rhs = std::exp(0.5 * psi.squaredNorm()) * gaussian_kernel(psi, nu) * std::exp(0.5 * nu.squaredNorm());
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
    const RffBank bank = RffBank::sample(16, 3, rng);
    const Vector v = rng.normal_vector(3);
    CHECK(std::exp(0.5 * v.squaredNorm()) * rff_kernel_estimate(bank, v, v) * std::exp(0.5 * v.squaredNorm()) ==
          doctest::Approx(std::exp(v.squaredNorm())).epsilon(1e-14));
  }

  TEST_CASE("simpson and quadrature") {
    const Domain1D dom;
    std::vector<double> ones(static_cast<std::size_t>(dom.points), 1.0);
    CHECK(simpson(ones, dom.spacing()) == doctest::Approx(10.0).epsilon(1e-14));
    CHECK_THROWS_AS(simpson(std::vector<double>{1.0, 1.0}, 0.1), NumericError);
    const auto fact = zero_psi_fixture();
    CHECK(partition_quadrature(fact, 0.3, -0.2, dom) == doctest::Approx(10.0).epsilon(1e-12));
  }

  TEST_CASE("quadrature grid refinement changes Z by less than 1e-6") {
    const auto fact = smooth_fixture();
    Domain1D coarse;
    Domain1D fine;
    fine.points = 2 * coarse.points - 1;
    Rng rng(8);
    for (const auto& [s, a] : random_pairs(20, rng)) {
      const double z = partition_quadrature(fact, s, a, coarse);
      CHECK(std::abs(partition_quadrature(fact, s, a, fine) - z) < 1e-6);
    }
  }

  TEST_CASE("spectral identity fixtures") {
    Rng rng(9);
    const Domain1D dom;
    const auto samples = random_samples(200, dom, rng);
    const RffBank bank = RffBank::sample(8192, smooth_fixture().dim, rng);
    CHECK(verify_spectral_identity(smooth_fixture(), bank, samples, dom) < 0.05);
    CHECK(verify_spectral_identity(zero_psi_fixture(), bank, samples, dom) < 0.02);
    CHECK_THROWS_AS(verify_spectral_identity(smooth_fixture(), RffBank::sample(4, 5, rng), samples, dom),
                    DimensionError);
  }

  TEST_CASE("spectral identity error shrinks with the feature count") {
    const Domain1D dom;
    const auto fact = smooth_fixture();
    std::vector<double> small, large;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(100 + seed);
      const auto samples = random_samples(50, dom, rng);
      small.push_back(verify_spectral_identity(fact, RffBank::sample(128, fact.dim, rng), samples, dom));
      large.push_back(verify_spectral_identity(fact, RffBank::sample(8192, fact.dim, rng), samples, dom));
    }
    CHECK(median(large) < median(small));
  }

  TEST_CASE("partition function is linear in the random features") {
    Rng rng(10);
    const auto pairs = random_pairs(50, rng);
    const RffBank bank = RffBank::sample(8192, 2, rng);
    CHECK(partition_linear_check(zero_psi_fixture(), bank, pairs) < 1e-3);
    CHECK(partition_linear_check(smooth_fixture(), bank, pairs) < 0.05);
  }
}
