#include <doctest.h>

#include <cmath>
#include <numbers>

#include "diffsr/envs/linear_gaussian.hpp"
#include "diffsr/envs/tabular.hpp"
#include "diffsr/numerics/errors.hpp"
#include "diffsr/oracles/dynamic_programming.hpp"
#include "diffsr/oracles/finite_diff.hpp"
#include "diffsr/oracles/gaussian.hpp"

using namespace diffsr;
using namespace diffsr::oracles;

namespace {

envs::TabularMdp single_state(double gamma) {
  return envs::TabularMdp({{Vector::Ones(1)}}, Matrix::Ones(1, 1), Vector::Ones(1), gamma);
}

}  // namespace

TEST_SUITE("oracles") {
  TEST_CASE("analytic score limits") {
    const envs::LinearGaussianMdp env(Matrix::Identity(2, 2), Matrix::Identity(2, 1), 1.0);
    const Vector s{{0.4, -0.3}}, a{{0.7}}, st{{1.5, 0.2}};
    const Vector m = env.mean_next(s, a);
    CHECK((analytic_score_gaussian(env, s, a, st, 1.0 - 1e-12) + st).norm() < 1e-5);

    const envs::LinearGaussianMdp narrow(Matrix::Identity(2, 2), Matrix::Identity(2, 1), 0.5);
    const Vector expect = -(st - narrow.mean_next(s, a)) / 0.25;
    CHECK((analytic_score_gaussian(narrow, s, a, st, 1e-12) - expect).norm() < 1e-8);
    CHECK(m.size() == 2);
  }

  TEST_CASE("posterior mean limits") {
    const auto env = envs::LinearGaussianMdp::standard(3, 2, 0.7);
    Rng rng(1);
    const Vector s = rng.normal_vector(3), a = rng.normal_vector(2), st = rng.normal_vector(3);
    CHECK((posterior_mean_gaussian(env, s, a, st, 1e-14) - st).norm() < 1e-10);
    CHECK((posterior_mean_gaussian(env, s, a, st, 1.0 - 1e-14) - env.mean_next(s, a)).norm() < 1e-6);
  }

  TEST_CASE("analytic score integrates to a normalized density") {
    const envs::LinearGaussianMdp env(Matrix::Constant(1, 1, 0.8), Matrix::Constant(1, 1, 0.5), 0.6);
    const Vector s{{1.0}}, a{{-0.4}};
    const double beta = 0.3;
    const double mean = std::sqrt(1.0 - beta) * env.mean_next(s, a)(0);
    const double var = (1.0 - beta) * 0.36 + beta;
    const int n = 20001;
    const double lo = -12.0, hi = 12.0, h = (hi - lo) / (n - 1);
    std::vector<double> logq(n, 0.0), q(n);
    double prev = analytic_score_gaussian(env, s, a, Vector::Constant(1, lo), beta)(0);
    for (int i = 1; i < n; ++i) {
      const double cur = analytic_score_gaussian(env, s, a, Vector::Constant(1, lo + i * h), beta)(0);
      logq[i] = logq[i - 1] + 0.5 * h * (prev + cur);
      prev = cur;
    }
    const double peak = *std::max_element(logq.begin(), logq.end());
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
      q[i] = std::exp(logq[i] - peak);
      z += (i == 0 || i == n - 1 ? 0.5 : 1.0) * q[i] * h;
    }
    double worst = 0.0, mass = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = lo + i * h;
      const double pdf = std::exp(-0.5 * (x - mean) * (x - mean) / var) / std::sqrt(2.0 * std::numbers::pi * var);
      worst = std::max(worst, std::abs(q[i] / z - pdf));
      mass += (i == 0 || i == n - 1 ? 0.5 : 1.0) * pdf * h;
    }
    CHECK(worst < 1e-3);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
  }

  TEST_CASE("diff_loss floor examples") {
    const envs::LinearGaussianMdp env(Matrix::Identity(2, 2), Matrix::Identity(2, 1), 1.0);
    CHECK(diff_loss_floor_gaussian(env, 0.5) == doctest::Approx(0.5));
    CHECK(diff_loss_floor_gaussian(env, 0.0) == 0.0);
  }

  TEST_CASE("value_iteration examples") {
    CHECK(value_iteration(single_state(0.99), 0.99)(0, 0) == doctest::Approx(100.0).epsilon(1e-9));
    Rng rng(2);
    const auto mdp = envs::make_random_mdp(4, 3, 0.9, rng);
    CHECK(value_iteration(mdp, 0.0) == mdp.reward);
    const auto chain = envs::make_chain(3, 0.9);
    CHECK(value_iteration(chain, 0.9)(0, 1) == doctest::Approx(8.1).epsilon(1e-9));
    CHECK_THROWS_AS(value_iteration(chain, 1.0), ContractError);
  }

  TEST_CASE("policy_eval_exact examples") {
    std::vector<std::vector<Vector>> P(2, std::vector<Vector>(2));
    P[0][0] = Vector{{1.0, 0.0}};
    P[0][1] = Vector{{0.0, 1.0}};
    P[1][0] = Vector{{0.0, 1.0}};
    P[1][1] = Vector{{1.0, 0.0}};
    const envs::TabularMdp sym(P, Matrix::Ones(2, 2), Vector{{0.5, 0.5}}, 0.9);
    const Matrix q = policy_eval_exact(sym, Matrix::Constant(2, 2, 0.5), 0.9);
    CHECK((q.array() - 10.0).abs().maxCoeff() < 1e-10);

    const auto chain = envs::make_chain(4, 0.9);
    Matrix forward = Matrix::Zero(4, 2);
    forward.col(1).setOnes();
    const Matrix qc = policy_eval_exact(chain, forward, 0.9);
    CHECK(qc(0, 1) == doctest::Approx(std::pow(0.9, 3) * 10.0).epsilon(1e-12));
    CHECK(qc(3, 0) == doctest::Approx(10.0).epsilon(1e-12));

    CHECK_THROWS_AS(policy_eval_exact(chain, Matrix::Ones(4, 2), 0.9), ContractError);
  }

  TEST_CASE("value_iteration agrees with policy_eval_exact of the greedy policy") {
    Rng rng(3);
    for (int i = 0; i < 10; ++i) {
      const auto mdp = envs::make_random_mdp(6, 3, 0.9, rng);
      const Matrix q = value_iteration(mdp, 0.9, 1e-12);
      const Matrix greedy = greedy_policy(q);
      CHECK((greedy.rowwise().sum().array() == 1.0).all());
      CHECK((policy_eval_exact(mdp, greedy, 0.9) - q).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  TEST_CASE("greedy_policy breaks ties toward the lowest index") {
    const Matrix g = greedy_policy(Matrix{{1.0, 1.0, 0.0}, {0.0, 2.0, 2.0}});
    CHECK(g == Matrix{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}});
  }

  TEST_CASE("finite_diff_check examples") {
    std::vector<double> x{3.0}, g{6.0};
    const std::vector<ParamView> params{ParamView{"x", std::span<double>(x)}};
    const std::vector<ParamView> grads{ParamView{"x", std::span<double>(g)}};
    auto rep = finite_diff_check([&] { return x[0] * x[0]; }, params, grads);
    CHECK(rep.max_relative_error < 1e-8);
    CHECK(x[0] == 3.0);

    g[0] = 0.0;
    rep = finite_diff_check([] { return 4.0; }, params, grads);
    CHECK(rep.max_relative_error == 0.0);
    CHECK(rep.checked == 0);

    g[0] = 5.0;
    rep = finite_diff_check([&] { return x[0] * x[0]; }, params, grads);
    CHECK(rep.max_relative_error > 0.1);
    CHECK(rep.worst == "x[0]");

    CHECK_THROWS_AS(finite_diff_check([&] { return std::log(x[0] - 3.0); }, params, grads), PoisonError);
  }
}
