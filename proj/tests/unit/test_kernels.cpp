#include <doctest.h>

#include <cmath>
#include <numbers>

#include "diffsr/kernels/kernels.hpp"
#include "diffsr/kernels/vmath.hpp"
#include "diffsr/numerics/rng.hpp"

using namespace diffsr;
using kernels::Activation;
using kernels::Exec;

namespace {

double max_diff(const Matrix& a, const Matrix& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("vsin and vcos agree with the standard library") {
    Rng rng(1);
    std::vector<double> x(10000), s(x.size()), c(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(-200.0, 200.0);
    x[0] = 0.0;
    x[1] = std::numbers::pi / 2;
    x[2] = -std::numbers::pi;
    kernels::vsin(x.data(), s.data(), static_cast<Eigen::Index>(x.size()));
    kernels::vcos(x.data(), c.data(), static_cast<Eigen::Index>(x.size()));
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      worst = std::max(worst, std::abs(s[i] - std::sin(x[i])));
      worst = std::max(worst, std::abs(c[i] - std::cos(x[i])));
    }
    CHECK(worst < 1e-15);
    CHECK(s[0] == 0.0);
    CHECK(s[1] == 1.0);
    CHECK(c[0] == 1.0);
  }

  TEST_CASE("vsin falls back outside its range") {
    std::vector<double> x{1e7, -3e9, 0.5}, s(3);
    kernels::vsin(x.data(), s.data(), 3);
    for (int i = 0; i < 3; ++i) CHECK(s[i] == std::sin(x[i]));
  }

  TEST_CASE("dense kernels: parallel matches the serial reference") {
    Rng rng(2);
    for (Activation act : {Activation::identity, Activation::relu, Activation::tanh, Activation::elu, Activation::sin}) {
      CAPTURE(static_cast<int>(act));
      const Matrix W = rng.normal_matrix(37, 11);
      const Vector b = rng.normal_vector(37);
      const Batch X = rng.normal_matrix(11, 150);
      Batch Zs, As, Zp, Ap;
      kernels::dense_forward(Exec::serial, W, &b, act, X, Zs, As);
      kernels::dense_forward(Exec::parallel, W, &b, act, X, Zp, Ap);
      CHECK(max_diff(Zs, Zp) < 1e-12);
      CHECK(max_diff(As, Ap) < 1e-12);

      const Batch dA = rng.normal_matrix(37, 150);
      Matrix dWs, dWp;
      Vector dbs, dbp;
      Batch dXs, dXp, dXi;
      kernels::dense_backward(Exec::serial, W, act, X, Zs, dA, dWs, &dbs, &dXs);
      kernels::dense_backward(Exec::parallel, W, act, X, Zp, dA, dWp, &dbp, &dXp);
      CHECK(max_diff(dWs, dWp) < 1e-10);
      CHECK(max_diff(dbs, dbp) < 1e-10);
      CHECK(max_diff(dXs, dXp) < 1e-10);
      kernels::dense_input_grad(Exec::parallel, W, act, Zp, dA, dXi);
      CHECK(max_diff(dXs, dXi) < 1e-10);
    }
  }

  TEST_CASE("bilinear contraction") {
    Rng rng(3);
    const Eigen::Index m = 5, d = 3, n = 130;
    const Batch psi = rng.normal_matrix(m, n), zeta = rng.normal_matrix(m * d, n);
    Batch s, p;
    kernels::bilinear_contract(Exec::serial, psi, zeta, d, s);
    kernels::bilinear_contract(Exec::parallel, psi, zeta, d, p);
    CHECK(max_diff(s, p) < 1e-12);

    Batch one_hot = Batch::Zero(m, 1);
    one_hot(2, 0) = 1.0;
    Batch row;
    kernels::bilinear_contract(Exec::serial, one_hot, zeta.leftCols(1), d, row);
    for (Eigen::Index j = 0; j < d; ++j) CHECK(row(j, 0) == zeta(2 * d + j, 0));

    const Batch dout = rng.normal_matrix(d, n);
    Batch dps, dzs, dpp, dzp;
    kernels::bilinear_backward(Exec::serial, psi, zeta, dout, dps, dzs);
    kernels::bilinear_backward(Exec::parallel, psi, zeta, dout, dpp, dzp);
    CHECK(max_diff(dps, dpp) < 1e-12);
    CHECK(max_diff(dzs, dzp) < 1e-12);
  }

  TEST_CASE("rff, gram and quadratic forms: parallel matches serial") {
    Rng rng(4);
    const Matrix omegas = rng.normal_matrix(300, 4);
    const Batch X = rng.normal_matrix(4, 100);
    Batch fs, fp;
    kernels::rff_features(Exec::serial, omegas, X, fs);
    kernels::rff_features(Exec::parallel, omegas, X, fp);
    CHECK(max_diff(fs, fp) < 1e-13);

    const Batch Q = rng.normal_matrix(4, 70);
    Matrix gs, gp;
    kernels::gaussian_gram(Exec::serial, X, Q, gs);
    kernels::gaussian_gram(Exec::parallel, X, Q, gp);
    CHECK(max_diff(gs, gp) < 1e-13);

    const Matrix A = rng.normal_matrix(4, 4);
    const Matrix M = A * A.transpose();
    Vector qs, qp;
    kernels::quadratic_forms(Exec::serial, M, X, qs);
    kernels::quadratic_forms(Exec::parallel, M, X, qp);
    CHECK(max_diff(qs, qp) < 1e-12);
  }

  TEST_CASE("kernels reject mismatched shapes") {
    Batch Z, A;
    CHECK_THROWS(kernels::dense_forward(Exec::parallel, Matrix::Zero(2, 3), nullptr, Activation::relu,
                                        Batch::Zero(4, 5), Z, A));
    Matrix out;
    CHECK_THROWS(kernels::gaussian_gram(Exec::parallel, Batch::Zero(2, 3), Batch::Zero(3, 3), out));
  }
}

#include <omp.h>

TEST_CASE("parallel results do not depend on the thread count") {
  Rng rng(5);
  const Matrix W = rng.normal_matrix(64, 9);
  const Batch X = rng.normal_matrix(9, 333);
  const int saved = omp_get_max_threads();
  Batch Z1, A1, Z4, A4;
  omp_set_num_threads(1);
  kernels::dense_forward(Exec::parallel, W, nullptr, Activation::sin, X, Z1, A1);
  Matrix dW1;
  kernels::dense_backward(Exec::parallel, W, Activation::sin, X, Z1, A1, dW1, nullptr, nullptr);
  omp_set_num_threads(4);
  kernels::dense_forward(Exec::parallel, W, nullptr, Activation::sin, X, Z4, A4);
  Matrix dW4;
  kernels::dense_backward(Exec::parallel, W, Activation::sin, X, Z4, A4, dW4, nullptr, nullptr);
  omp_set_num_threads(saved);
  CHECK(A1 == A4);
  CHECK(dW1 == dW4);
}
