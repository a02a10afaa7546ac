#include <doctest.h>

#include <cmath>
#include <numbers>

#include "diffsr/agent/replay.hpp"
#include "diffsr/diffusion/head.hpp"
#include "diffsr/diffusion/losses.hpp"
#include "diffsr/diffusion/schedule.hpp"
#include "diffsr/diffusion/score.hpp"
#include "diffsr/diffusion/trainer.hpp"
#include "diffsr/envs/linear_gaussian.hpp"
#include "diffsr/numerics/errors.hpp"
#include "diffsr/oracles/gaussian.hpp"

using namespace diffsr;
using namespace diffsr::diffusion;

namespace {

ScorePair small_pair(Eigen::Index d, Eigen::Index k, Eigen::Index m, Eigen::Index width, Rng& rng) {
  ScorePairConfig c;
  c.state_dim = d;
  c.action_dim = k;
  c.feature_dim = m;
  c.psi_width = width;
  c.zeta_width = width;
  return ScorePair::create(c, rng);
}

void zero_output(Mlp& net) {
  net.layers().back().weight.setZero();
  net.layers().back().bias.setZero();
}

agent::ReplayBuffer gaussian_buffer(const envs::LinearGaussianMdp& env, std::size_t n, Rng& rng) {
  const Eigen::Index d = env.state_dim(), k = env.spec().action_dim;
  agent::ReplayBuffer buffer(n, d, k);
  for (std::size_t i = 0; i < n; ++i) {
    envs::Transition t;
    t.s = rng.normal_vector(d);
    t.a = rng.uniform_matrix(k, 1, -1.0, 1.0);
    t.s_next = env.sample_next(t.s, t.a, rng);
    buffer.push(t);
  }
  return buffer;
}

// Hands out dynamics only; reading rewards is an error.
class DynamicsOnly final : public envs::TransitionSource {
 public:
  explicit DynamicsOnly(const agent::ReplayBuffer& inner) : inner_(inner) {}
  std::size_t size() const override { return inner_.size(); }
  envs::TransitionBatch sample(std::size_t, Rng&) const override {
    throw ContractError("rewards were requested");
  }
  envs::DynamicsBatch sample_dynamics(std::size_t n, Rng& rng) const override {
    return inner_.sample_dynamics(n, rng);
  }

 private:
  const agent::ReplayBuffer& inner_;
};

}  // namespace

TEST_SUITE("diffusion") {
  TEST_CASE("make_noise_schedule examples") {
    const auto s = make_noise_schedule(1000, 1e-4, 0.02);
    CHECK(s.size() == 1000);
    CHECK(s.front() == 1e-4);
    CHECK(s.back() == 0.02);
    for (std::size_t k = 1; k < s.size(); ++k) CHECK(s[k] > s[k - 1]);
    const auto two = make_noise_schedule(2, 0.1, 0.3);
    CHECK(two.betas() == std::vector<double>{0.1, 0.3});
    CHECK_THROWS_AS(make_noise_schedule(10, 1e-4, 1.0), ConfigError);
    CHECK_THROWS_AS(make_noise_schedule(1, 1e-4, 0.5), ConfigError);
  }

  TEST_CASE("corrupt examples") {
    const Vector out = corrupt_with_noise(Vector{{2.0, 2.0}}, 0.19, Vector{{1.0, -1.0}});
    CHECK(out(0) == doctest::Approx(2.23589).epsilon(1e-5));
    CHECK(out(1) == doctest::Approx(1.36411).epsilon(1e-5));

    Rng rng(1);
    const Vector s{{0.5, -1.0}};
    CHECK((corrupt(s, 1e-14, rng) - s).norm() < 1e-6);

    const double beta = 0.95;
    const int n = 100000;
    Vector mean = Vector::Zero(2);
    Matrix second = Matrix::Zero(2, 2);
    for (int i = 0; i < n; ++i) {
      const Vector x = corrupt(s, beta, rng);
      mean += x;
      second += x * x.transpose();
    }
    mean /= n;
    const Matrix cov = second / n - mean * mean.transpose();
    CHECK((mean - std::sqrt(1.0 - beta) * s).cwiseAbs().maxCoeff() < 0.02);
    const double se_var = beta * std::sqrt(2.0 / n), se_cov = beta / std::sqrt(n);
    CHECK(std::abs(cov(0, 0) - beta) < 3.0 * se_var);
    CHECK(std::abs(cov(1, 1) - beta) < 3.0 * se_var);
    CHECK(std::abs(cov(0, 1)) < 3.0 * se_cov);
  }

  TEST_CASE("score_eval examples") {
    Rng rng(2);
    ScorePair sp = small_pair(3, 1, 4, 8, rng);
    const Vector s = rng.normal_vector(3), a = rng.normal_vector(1), st = rng.normal_vector(3);
    ScorePair zero = sp;
    zero_output(zero.zeta);
    CHECK(score_eval(zero, s, a, st, 0.1).isZero(0.0));

    ScorePair hot = sp;
    zero_output(hot.psi);
    hot.psi.layers().back().bias(2) = 1.0;
    const Batch zeta = hot.zeta.evaluate(zeta_input(st, Vector::Constant(1, 0.1)), Exec::serial);
    const Vector out = score_eval(hot, s, a, st, 0.1);
    for (Eigen::Index j = 0; j < 3; ++j) CHECK(out(j) == zeta(2 * 3 + j, 0));

    CHECK_THROWS(score_eval(sp, s, a, Vector::Zero(2), 0.1));
  }

  TEST_CASE("diff_loss with a zero score equals beta d") {
    Rng rng(3);
    ScorePair sp = small_pair(4, 1, 3, 6, rng);
    zero_output(sp.zeta);
    const Eigen::Index n = 100000;
    const envs::DynamicsBatch batch{rng.normal_matrix(4, n), rng.normal_matrix(1, n), rng.normal_matrix(4, n)};
    CorruptionDraws draws;
    draws.level.assign(static_cast<std::size_t>(n), 0);
    draws.beta = Vector::Constant(n, 0.5);
    draws.eps = rng.normal_matrix(4, n);
    const double loss = diff_loss(sp, batch, draws).loss;
    CHECK(loss == doctest::Approx(2.0).epsilon(0.01));
  }

  TEST_CASE("diff_loss at the analytic score reaches the posterior-variance floor") {
    Rng rng(4);
    const auto env = envs::LinearGaussianMdp::standard(3, 2, 0.7);
    for (double beta : {0.01, 0.2, 0.7}) {
      const int n = 100000;
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        const Vector s = rng.normal_vector(3), a = rng.normal_vector(2);
        const Vector sn = env.sample_next(s, a, rng);
        const Vector st = corrupt(sn, beta, rng);
        total += (st + beta * oracles::analytic_score_gaussian(env, s, a, st, beta) - std::sqrt(1.0 - beta) * sn)
                     .squaredNorm();
      }
      CHECK(total / n == doctest::Approx(oracles::diff_loss_floor_gaussian(env, beta)).epsilon(0.02));
    }
  }

  TEST_CASE("diff_loss rejects an empty batch") {
    Rng rng(5);
    const ScorePair sp = small_pair(2, 1, 2, 4, rng);
    const envs::DynamicsBatch empty{Batch(2, 0), Batch(1, 0), Batch(2, 0)};
    CHECK_THROWS_AS(diff_loss(sp, empty, make_noise_schedule(10, 0.01, 0.1), rng), ContractError);
  }

  TEST_CASE("diff_loss parallel matches serial") {
    Rng rng(6);
    const ScorePair sp = small_pair(3, 1, 8, 40, rng);
    const envs::DynamicsBatch batch{rng.normal_matrix(3, 300), rng.normal_matrix(1, 300), rng.normal_matrix(3, 300)};
    const auto draws = sample_corruption(300, 3, make_noise_schedule(100, 1e-3, 0.5), rng);
    auto a = diff_loss(sp, batch, draws, Exec::serial);
    auto b = diff_loss(sp, batch, draws, Exec::parallel);
    CHECK(a.loss == doctest::Approx(b.loss).epsilon(1e-12));
    const auto va = a.grad.zeta.views(), vb = b.grad.zeta.views();
    for (std::size_t t = 0; t < va.size(); ++t)
      for (std::size_t i = 0; i < va[t].data.size(); ++i)
        CHECK(va[t].data[i] == doctest::Approx(vb[t].data[i]).epsilon(1e-9).scale(1e-12));
  }

  TEST_CASE("norm_loss examples") {
    Rng rng(7);
    ScorePair sp = small_pair(2, 1, 2, 4, rng);
    zero_output(sp.psi);
    // ψ is the output bias of the psi net; the head is set by hand.
    Mlp net({Layer{Matrix::Identity(2, 2), Vector(), Activation::sin},
             Layer{Matrix::Identity(2, 2), Vector(), Activation::elu}});
    ReprHead head(net);
    const Batch s = rng.normal_matrix(2, 3), a = rng.normal_matrix(1, 3);

    sp.psi.layers().back().bias = Vector{{0.0, 0.0}};
    head.W2() = Matrix::Zero(2, 2);
    head.W1() = Matrix::Zero(2, 2);
    // ψ = 0, φ = 0: the log floor keeps the loss finite.
    CHECK(std::isfinite(norm_loss(sp, head, s, a).loss));

    head.W1() = Matrix::Identity(2, 2);
    head.W2() = Matrix::Zero(2, 2);
    head.W2()(0, 0) = 1.0;
    sp.psi.layers().back().bias = Vector{{std::numbers::pi / 2, 0.0}};
    // ψ = (π/2, 0): φ = (elu(1), 0) = (1, 0), |ψ|² = π²/4.
    CHECK(norm_loss(sp, head, s, a).loss == doctest::Approx(std::pow(std::numbers::pi * std::numbers::pi / 4, 2)));

    head.W1() = Matrix::Zero(2, 2);
    head.W1()(0, 1) = 1.0;
    sp.psi.layers().back().bias = Vector{{0.0, std::numbers::pi / 2}};
    CHECK(norm_loss(sp, head, s, a).loss == doctest::Approx(std::pow(std::numbers::pi * std::numbers::pi / 4, 2)));

    sp.psi.layers().back().bias = Vector{{1.0, 0.0}};
    head.W1() = Matrix::Zero(2, 2);
    head.W1()(0, 0) = std::numbers::pi / 2;
    CHECK(norm_loss(sp, head, s, a).loss == doctest::Approx(1.0));
  }

  TEST_CASE("phi examples") {
    Rng rng(8);
    const ScorePair sp = small_pair(2, 1, 3, 6, rng);
    ReprHead head = ReprHead::create(3, 16, 5, rng);
    const Vector s = rng.normal_vector(2), a = rng.normal_vector(1);
    ReprHead collapsed = head;
    collapsed.W1().setZero();
    CHECK(phi(collapsed, sp, s, a).isZero(0.0));

    ReprHead scalar(Mlp({Layer{Matrix::Constant(1, 1, std::numbers::pi / 2), Vector(), Activation::sin},
                         Layer{Matrix::Ones(1, 1), Vector(), Activation::elu}}));
    CHECK(scalar.apply(Batch::Ones(1, 1), Exec::serial)(0, 0) == 1.0);

    const Batch psi = 3.0 * rng.normal_matrix(3, 2000);
    const Batch out = head.apply(psi);
    CHECK(out.minCoeff() >= -1.0);
    CHECK(phi(head, sp, s, a) == phi(head, sp, s, a));
  }

  TEST_CASE("phi is Lipschitz in psi with constant |W2| |W1|") {
    Rng rng(9);
    const ReprHead head = ReprHead::create(4, 32, 8, rng);
    const double bound = head.W2().operatorNorm() * head.W1().operatorNorm();
    for (int i = 0; i < 200; ++i) {
      const Batch p = rng.normal_matrix(4, 1), q = p + 0.1 * rng.normal_matrix(4, 1);
      const double lhs = (head.apply(p) - head.apply(q)).norm();
      CHECK(lhs <= bound * (p - q).norm() * (1.0 + 1e-12));
    }
  }

  TEST_CASE("train_representation examples") {
    Rng rng(10);
    const auto env = envs::LinearGaussianMdp::standard(3, 1, 0.7);
    const auto buffer = gaussian_buffer(env, 20000, rng);
    const DynamicsOnly source(buffer);
    const auto schedule = make_noise_schedule(1000, 1e-4, 0.02);

    ScorePair sp = small_pair(3, 1, 8, 64, rng);
    const ScorePair initial = sp;
    ScorePairOptimizer opt(sp, 1e-3);
    ReprTrainConfig none;
    none.steps = 0;
    CHECK(train_representation(source, sp, nullptr, schedule, none, opt, rng).empty());
    CHECK(sp.psi.layers()[0].weight == initial.psi.layers()[0].weight);

    ReprTrainConfig cfg;
    cfg.steps = 2000;
    cfg.batch_size = 256;
    cfg.learning_rate = 1e-3;
    train_representation(source, sp, nullptr, schedule, cfg, opt, rng);

    const envs::DynamicsBatch held = buffer.sample_dynamics(20000, rng);
    const double loss = diff_loss(sp, held, schedule, rng).loss;
    double floor = 0.0;
    for (double beta : schedule.betas()) floor += oracles::diff_loss_floor_gaussian(env, beta);
    floor /= static_cast<double>(schedule.size());
    CHECK(loss == doctest::Approx(floor).epsilon(0.15));
  }

  TEST_CASE("train_representation is deterministic given the seed") {
    const auto env = envs::LinearGaussianMdp::standard(2, 1, 0.5);
    Rng data(11);
    const auto buffer = gaussian_buffer(env, 2000, data);
    const auto schedule = make_noise_schedule(100, 1e-3, 0.05);
    auto run = [&] {
      Rng rng(12);
      ScorePair sp = small_pair(2, 1, 4, 16, rng);
      ScorePairOptimizer opt(sp, 1e-3);
      ReprTrainConfig cfg;
      cfg.steps = 30;
      cfg.batch_size = 64;
      train_representation(buffer, sp, nullptr, schedule, cfg, opt, rng);
      return sp;
    };
    const ScorePair a = run(), b = run();
    for (std::size_t l = 0; l < a.zeta.layers().size(); ++l)
      CHECK(a.zeta.layers()[l].weight == b.zeta.layers()[l].weight);
    CHECK(a.psi.layers()[0].bias == b.psi.layers()[0].bias);
  }

  TEST_CASE("train_representation needs a full batch") {
    const auto env = envs::LinearGaussianMdp::standard(2, 1, 0.5);
    Rng rng(13);
    const auto buffer = gaussian_buffer(env, 10, rng);
    ScorePair sp = small_pair(2, 1, 4, 8, rng);
    ScorePairOptimizer opt(sp, 1e-3);
    ReprTrainConfig cfg;
    cfg.batch_size = 64;
    CHECK_THROWS_AS(train_representation(buffer, sp, nullptr, make_noise_schedule(10, 0.01, 0.1), cfg, opt, rng),
                    ContractError);
  }
}

TEST_CASE("cosine learning-rate decay in train_representation" * doctest::test_suite("diffusion")) {
  const auto env = envs::LinearGaussianMdp::standard(2, 1, 0.5);
  Rng rng(14);
  const auto buffer = gaussian_buffer(env, 200, rng);
  ScorePair sp = small_pair(2, 1, 4, 8, rng);
  ScorePairOptimizer opt(sp, 0.7);
  ReprTrainConfig cfg;
  cfg.steps = 4;
  cfg.batch_size = 16;
  train_representation(buffer, sp, nullptr, make_noise_schedule(10, 0.01, 0.1), cfg, opt, rng);
  CHECK(opt.psi.config().learning_rate == 0.7);
  cfg.learning_rate = 1e-3;
  cfg.final_learning_rate = 0.0;
  train_representation(buffer, sp, nullptr, make_noise_schedule(10, 0.01, 0.1), cfg, opt, rng);
  const double last = 0.5e-3 * (1.0 + std::cos(0.75 * std::numbers::pi));
  CHECK(opt.psi.config().learning_rate == doctest::Approx(last).epsilon(1e-12));
  CHECK(opt.zeta.config().learning_rate == doctest::Approx(last).epsilon(1e-12));
}
