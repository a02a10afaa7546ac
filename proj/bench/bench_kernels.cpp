// Serial reference vs OpenMP kernels at the training sizes. The second
// argument of every benchmark selects the path: 0 serial, 1 parallel.
#include <benchmark/benchmark.h>

#include "diffsr/kernels/kernels.hpp"
#include "diffsr/numerics/rng.hpp"

using namespace diffsr;
using diffsr::kernels::Activation;
using diffsr::kernels::Exec;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::parallel : Exec::serial; }

void BM_DenseForward(benchmark::State& state) {
  const Eigen::Index batch = state.range(0);
  Rng rng(1);
  const Matrix W = rng.normal_matrix(256, 256);
  const Vector b = rng.normal_vector(256);
  const Batch X = rng.normal_matrix(256, batch);
  Batch Z, A;
  for (auto _ : state) {
    kernels::dense_forward(exec_of(state), W, &b, Activation::elu, X, Z, A);
    benchmark::DoNotOptimize(A.data());
  }
  state.SetItemsProcessed(state.iterations() * batch);
}

void BM_DenseBackward(benchmark::State& state) {
  const Eigen::Index batch = state.range(0);
  Rng rng(2);
  const Matrix W = rng.normal_matrix(256, 256);
  const Batch X = rng.normal_matrix(256, batch);
  Batch Z, A;
  kernels::dense_forward(Exec::serial, W, nullptr, Activation::sin, X, Z, A);
  const Batch dA = rng.normal_matrix(256, batch);
  Matrix dW;
  Vector db;
  Batch dX;
  for (auto _ : state) {
    kernels::dense_backward(exec_of(state), W, Activation::sin, X, Z, dA, dW, &db, &dX);
    benchmark::DoNotOptimize(dX.data());
  }
  state.SetItemsProcessed(state.iterations() * batch);
}

void BM_BilinearContract(benchmark::State& state) {
  const Eigen::Index batch = state.range(0), m = 32, d = 3;
  Rng rng(3);
  const Batch psi = rng.normal_matrix(m, batch);
  const Batch zeta = rng.normal_matrix(m * d, batch);
  Batch out;
  for (auto _ : state) {
    kernels::bilinear_contract(exec_of(state), psi, zeta, d, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * batch);
}

void BM_RffFeatures(benchmark::State& state) {
  const Eigen::Index batch = state.range(0);
  Rng rng(4);
  const Matrix omegas = rng.normal_matrix(4096, 2);
  const Batch X = rng.normal_matrix(2, batch);
  Batch out;
  for (auto _ : state) {
    kernels::rff_features(exec_of(state), omegas, X, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * batch);
}

void BM_GaussianGram(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  Rng rng(5);
  const Batch P = rng.normal_matrix(32, n);
  Matrix out;
  for (auto _ : state) {
    kernels::gaussian_gram(exec_of(state), P, P, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}

void BM_QuadraticForms(benchmark::State& state) {
  const Eigen::Index batch = state.range(0);
  Rng rng(6);
  const Matrix M = rng.normal_matrix(256, 256);
  const Batch X = rng.normal_matrix(256, batch);
  Vector out;
  for (auto _ : state) {
    kernels::quadratic_forms(exec_of(state), M, X, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * batch);
}

}  // namespace

BENCHMARK(BM_DenseForward)->ArgsProduct({{256, 1024}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DenseBackward)->ArgsProduct({{256, 1024}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BilinearContract)->ArgsProduct({{256, 1024}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RffFeatures)->ArgsProduct({{256, 1024}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GaussianGram)->ArgsProduct({{512, 2048}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_QuadraticForms)->ArgsProduct({{256, 1024}, {0, 1}})->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
