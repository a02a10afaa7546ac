#include <doctest.h>

#include <cmath>
#include <numbers>

#include "diffsr/agent/critic.hpp"
#include "diffsr/agent/online.hpp"
#include "diffsr/agent/policy.hpp"
#include "diffsr/agent/replay.hpp"
#include "diffsr/agent/tabular_td.hpp"
#include "diffsr/envs/tabular.hpp"
#include "diffsr/numerics/adam.hpp"
#include "diffsr/numerics/errors.hpp"
#include "diffsr/oracles/dynamic_programming.hpp"

using namespace diffsr;
using namespace diffsr::agent;

namespace {

class ZeroQ final : public ActionValue {
 public:
  Vector values(const Batch&, const Batch& a) const override { return Vector::Zero(a.cols()); }
  Vector values_and_action_grad(const Batch&, const Batch& a, Batch& grad) const override {
    grad = Batch::Zero(a.rows(), a.cols());
    return Vector::Zero(a.cols());
  }
};

// Q(s, a) = -(a - 0.5)².
class QuadraticQ final : public ActionValue {
 public:
  Vector values(const Batch&, const Batch& a) const override {
    return -(a.row(0).array() - 0.5).square().matrix().transpose();
  }
  Vector values_and_action_grad(const Batch& s, const Batch& a, Batch& grad) const override {
    grad = -2.0 * (a.array() - 0.5);
    return values(s, a);
  }
};

envs::Transition transition(double s, double a, double r, double s_next) {
  envs::Transition t;
  t.s = Vector::Constant(1, s);
  t.a = Vector::Constant(1, a);
  t.r = r;
  t.s_next = Vector::Constant(1, s_next);
  t.done = false;
  return t;
}

// A 1 -> 1 -> 2 policy whose mean and log-std are pure biases.
Policy bias_policy(double mean, double log_std) {
  Mlp net({Layer{Matrix::Zero(2, 1), Vector{{mean, log_std}}, Activation::identity}});
  return Policy(std::move(net), Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
}

AgentConfig tiny_config() {
  AgentConfig c;
  c.total_steps = 600;
  c.warmup_steps = 200;
  c.batch_size = 32;
  c.noise_levels = 20;
  c.feature_dim = 4;
  c.fourier_dim = 8;
  c.repr_dim = 8;
  c.psi_width = 16;
  c.zeta_width = 16;
  c.actor_width = 16;
  c.feature_update_ratio = 2;
  c.eval_interval = 200;
  c.eval_episodes = 2;
  c.seed = 5;
  return c;
}

}  // namespace

TEST_SUITE("agent") {
  TEST_CASE("q_value examples") {
    Rng rng(1);
    diffusion::ScorePairConfig sc;
    sc.state_dim = 2;
    sc.action_dim = 1;
    sc.feature_dim = 3;
    sc.psi_width = 8;
    sc.zeta_width = 8;
    const auto sp = diffusion::ScorePair::create(sc, rng);
    Critic c = Critic::create(3, 4, 5, rng);
    for (QWhich w : {QWhich::online1, QWhich::online2, QWhich::target1, QWhich::target2})
      CHECK(q_value(c, sp, rng.normal_vector(2), rng.normal_vector(1), w) == 0.0);

    // φ = e_2 via W1 ψ = π/2 on ψ = e_0 and W2 = e_2.
    Matrix w1 = Matrix::Zero(1, 3);
    w1(0, 0) = std::numbers::pi / 2;
    c.head[0] = diffusion::ReprHead(Mlp({Layer{w1, Vector(), Activation::sin},
                                         Layer{Matrix(Vector::Unit(5, 2)), Vector(), Activation::elu}}));
    c.xi[0] = Vector{{0.1, 0.2, -0.7, 0.4, 0.5}};
    const Vector q = q_values(c, Batch(Vector::Unit(3, 0)), QWhich::online1, Exec::serial);
    CHECK(q(0) == doctest::Approx(-0.7).epsilon(1e-15));
  }

  TEST_CASE("critic loss examples") {
    Rng rng(2);
    const Critic c = Critic::create(3, 6, 4, rng);
    const Batch psi = rng.normal_matrix(3, 10);
    CriticLoss zero = critic_loss(c, psi, Vector::Zero(10));
    CHECK(zero.loss == 0.0);
    for (int i = 0; i < 2; ++i) {
      CHECK(zero.dxi[i].isZero(0.0));
      for (const auto& v : zero.dhead[i].views())
        for (double g : v.data) CHECK(g == 0.0);
    }
    CHECK_THROWS_AS(critic_loss(c, psi, Vector::Constant(10, NAN)), PoisonError);
    CHECK_THROWS_AS(critic_loss(c, Batch(3, 0), Vector(0)), ContractError);
  }

  TEST_CASE("single deterministic transition gives target r") {
    Rng rng(3);
    diffusion::ScorePairConfig sc;
    sc.state_dim = 1;
    sc.action_dim = 1;
    sc.feature_dim = 3;
    sc.psi_width = 8;
    sc.zeta_width = 8;
    const auto sp = diffusion::ScorePair::create(sc, rng);
    Critic c = Critic::create(3, 4, 5, rng);
    c.xi[0] = rng.normal_vector(5);
    c.xi[1] = rng.normal_vector(5);
    const Policy pi = bias_policy(0.0, -1.0);
    ReplayBuffer buf(4, 1, 1);
    buf.push(transition(0.3, 0.2, 1.0, 0.4));
    const auto batch = buf.sample(1, rng);
    const TdTargets t = td_targets(c, sp, pi, batch, 0.99, 0.0, Vector(), rng.normal_matrix(1, 1));
    CHECK(t.y(0) == 1.0);
    const Batch psi = sp.psi_features(batch.s, batch.a, Exec::serial);
    const CriticLoss l = critic_loss(c, psi, t.y);
    const double q1 = q_values(c, psi, QWhich::online1)(0), q2 = q_values(c, psi, QWhich::online2)(0);
    CHECK(l.per_critic[0] == doctest::Approx((1.0 - q1) * (1.0 - q1)));
    CHECK(l.per_critic[1] == doctest::Approx((1.0 - q2) * (1.0 - q2)));
    CHECK(l.loss == doctest::Approx(0.5 * (l.per_critic[0] + l.per_critic[1])));

    const TdTargets with_bonus = td_targets(c, sp, pi, batch, 0.99, 0.0, Vector::Constant(1, 0.25),
                                            rng.normal_matrix(1, 1));
    CHECK(with_bonus.y(0) == 1.25);
  }

  TEST_CASE("TD targets take the minimum of the two target critics") {
    Rng rng(4);
    diffusion::ScorePairConfig sc;
    sc.state_dim = 1;
    sc.action_dim = 1;
    sc.feature_dim = 3;
    sc.psi_width = 8;
    sc.zeta_width = 8;
    const auto sp = diffusion::ScorePair::create(sc, rng);
    Critic c = Critic::create(3, 4, 5, rng);
    c.target_xi[0] = rng.normal_vector(5);
    c.target_xi[1] = rng.normal_vector(5);
    const Policy pi = bias_policy(0.1, -2.0);
    ReplayBuffer buf(8, 1, 1);
    for (int i = 0; i < 8; ++i) buf.push(transition(rng.normal(), rng.uniform(-1.0, 1.0), 0.0, rng.normal()));
    const auto batch = buf.sample(8, rng);
    const Batch eps = rng.normal_matrix(1, 8);
    const TdTargets t = td_targets(c, sp, pi, batch, 0.9, 0.0, Vector(), eps);
    const auto next = pi.sample(batch.s_next, eps);
    const Batch psi = sp.psi_features(batch.s_next, next.action, Exec::serial);
    const Vector expect =
        q_values(c, psi, QWhich::target1).cwiseMin(q_values(c, psi, QWhich::target2));
    for (Eigen::Index k = 0; k < 8; ++k) CHECK(t.y(k) == doctest::Approx(0.9 * expect(k)).epsilon(1e-12));
  }

  TEST_CASE("soft_update examples") {
    Vector t = Vector::Zero(3);
    soft_update(t, Vector::Constant(3, 2.0), 0.5);
    CHECK(t == Vector::Constant(3, 1.0));
    const Vector online{{4.0, -1.0, 0.5}};
    Vector same = t;
    soft_update(same, online, 0.0);
    CHECK(same == t);
    soft_update(same, online, 1.0);
    CHECK(same == online);
    CHECK_THROWS_AS(soft_update(same, Vector::Zero(2), 0.5), DimensionError);
  }

  TEST_CASE("replay buffer examples") {
    Rng rng(5);
    ReplayBuffer buf(2, 1, 1);
    CHECK_THROWS_AS(buf.sample(1, rng), ContractError);
    buf.push(transition(1, 0, 0, 0));
    buf.push(transition(2, 0, 0, 0));
    buf.push(transition(3, 0, 0, 0));
    CHECK(buf.size() == 2);
    CHECK(buf.at(0).s(0) == 2.0);
    CHECK(buf.at(1).s(0) == 3.0);

    ReplayBuffer same(5, 1, 1);
    for (int i = 0; i < 5; ++i) same.push(transition(0.7, -0.2, 1.5, 0.1));
    const auto b = same.sample(5, rng);
    CHECK((b.s.array() == 0.7).all());
    CHECK((b.r.array() == 1.5).all());
    envs::Transition wrong = transition(0, 0, 0, 0);
    wrong.s = Vector::Zero(2);
    CHECK_THROWS(buf.push(wrong));
  }

  TEST_CASE("replay sampling is uniform") {
    Rng rng(6);
    ReplayBuffer buf(10, 1, 1);
    for (int i = 0; i < 10; ++i) buf.push(transition(i, 0, 0, 0));
    std::vector<int> counts(10, 0);
    const int n = 100000;
    const auto b = buf.sample(n, rng);
    for (Eigen::Index k = 0; k < n; ++k) ++counts[static_cast<std::size_t>(b.s(0, k))];
    const double expect = n / 10.0, sd = std::sqrt(n * 0.1 * 0.9);
    for (int c : counts) CHECK(std::abs(c - expect) < 3.0 * sd);
  }

  TEST_CASE("policy actions stay inside the bounds") {
    Rng rng(7);
    const Policy pi = Policy::create(3, Vector{{-2.0}}, Vector{{2.0}}, {16, 16}, rng);
    const auto s = pi.sample(5.0 * rng.normal_matrix(3, 1000), rng);
    CHECK(s.action.minCoeff() >= -2.0);
    CHECK(s.action.maxCoeff() <= 2.0);
    CHECK(s.log_prob.allFinite());
    const Policy wide = bias_policy(40.0, 5.0);
    const auto w = wide.sample(Batch::Zero(1, 100), rng);
    CHECK(w.log_std.maxCoeff() == kLogStdMax);
    CHECK(w.action.cwiseAbs().maxCoeff() <= 1.0);
    CHECK(w.log_prob.allFinite());
    CHECK(log_one_minus_tanh_sq(0.0) == 0.0);
    CHECK(log_one_minus_tanh_sq(30.0) == doctest::Approx(std::log(4.0) - 60.0).epsilon(1e-12));
  }

  TEST_CASE("entropy-only objective widens a narrow policy") {
    Policy pi = bias_policy(0.0, -3.0);
    AdamState opt(AdamConfig{.learning_rate = 0.05}, pi.net().parameters());
    Rng rng(8);
    const Batch obs = Batch::Zero(1, 256);
    const Batch eps = rng.normal_matrix(1, 256);
    double prev = -3.0;
    for (int i = 0; i < 30; ++i) {
      ActorLoss l = actor_loss(pi, obs, eps, ZeroQ(), 0.1);
      opt.step(pi.net().parameters(), l.grad.views());
      const double log_std = pi.net().layers()[0].bias(1);
      CHECK(log_std > prev);
      prev = log_std;
    }
  }

  TEST_CASE("bandit converges to the argmax") {
    Rng rng(9);
    Policy pi = Policy::create(1, Vector{{-1.0}}, Vector{{1.0}}, {16}, rng);
    AdamState opt(AdamConfig{.learning_rate = 3e-3}, pi.net().parameters());
    const Batch obs = Batch::Ones(1, 256);
    for (int i = 0; i < 500; ++i) actor_update(pi, opt, obs, QuadraticQ(), 0.1, rng);
    CHECK(pi.act_deterministic(Vector::Ones(1))(0) == doctest::Approx(0.5).epsilon(0.1));
    CHECK(std::abs(pi.act_deterministic(Vector::Ones(1))(0) - 0.5) < 0.05);
  }

  TEST_CASE("CriticActionValue is the online minimum") {
    Rng rng(10);
    diffusion::ScorePairConfig sc;
    sc.state_dim = 2;
    sc.action_dim = 1;
    sc.feature_dim = 3;
    sc.psi_width = 8;
    sc.zeta_width = 8;
    const auto sp = diffusion::ScorePair::create(sc, rng);
    Critic c = Critic::create(3, 4, 5, rng);
    c.xi[0] = rng.normal_vector(5);
    c.xi[1] = rng.normal_vector(5);
    const CriticActionValue qv(c, sp, Exec::serial);
    const Batch s = rng.normal_matrix(2, 20), a = rng.uniform_matrix(1, 20, -1.0, 1.0);
    Batch grad;
    const Vector v = qv.values_and_action_grad(s, a, grad);
    const Vector v2 = qv.values(s, a);
    for (Eigen::Index k = 0; k < 20; ++k) {
      const double q1 = q_value(c, sp, s.col(k), a.col(k), QWhich::online1);
      const double q2 = q_value(c, sp, s.col(k), a.col(k), QWhich::online2);
      CHECK(v(k) == doctest::Approx(std::min(q1, q2)).epsilon(1e-12));
      CHECK(v2(k) == doctest::Approx(v(k)).epsilon(1e-12));
      const double h = 1e-6;
      const Vector ap = a.col(k) + Vector::Constant(1, h), am = a.col(k) - Vector::Constant(1, h);
      const double fd = (qv.values(Batch(s.col(k)), Batch(ap))(0) - qv.values(Batch(s.col(k)), Batch(am))(0)) / (2 * h);
      CHECK(grad(0, k) == doctest::Approx(fd).epsilon(1e-5).scale(1e-6));
    }
  }

  TEST_CASE("TD policy evaluation on one-hot features matches the exact values") {
    Rng rng(11);
    const auto chain = envs::make_chain(4, 0.9);
    const Matrix policy = Matrix::Constant(4, 2, 0.5);
    const Matrix td = td_policy_evaluation(chain, policy, 0.9, LinearTdConfig{}, rng);
    const Matrix exact = oracles::policy_eval_exact(chain, policy, 0.9);
    CHECK(((td - exact).array().abs() / exact.array().abs().max(1e-12)).maxCoeff() < 0.01);
  }

  TEST_CASE("config validation") {
    AgentConfig c;
    CHECK_NOTHROW(c.validate());
    c.gamma = 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = AgentConfig{};
    c.env = "cartpole";
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }

  TEST_CASE("T = 0 produces no records and no updates") {
    AgentConfig c = tiny_config();
    c.total_steps = 0;
    CHECK(run_online(c).empty());
    OnlineAgent agent(c);
    agent.run(0, nullptr);
    CHECK(agent.critic_updates() == 0);
    CHECK(agent.buffer().size() == 0);
  }

  TEST_CASE("online runs are deterministic and resumable") {
    const AgentConfig c = tiny_config();
    std::vector<std::string> a, b, resumed;
    for (const auto& r : run_online(c)) a.push_back(metrics_line(r));
    for (const auto& r : run_online(c)) b.push_back(metrics_line(r));
    CHECK(a.size() == 3);
    CHECK(a == b);

    OnlineAgent first(c);
    first.run(400, [&](const MetricsRecord& r) { resumed.push_back(metrics_line(r)); });
    const TensorArchive snap = first.checkpoint();
    OnlineAgent second(c);
    second.restore(snap);
    CHECK(second.steps_done() == 400);
    second.run(600, [&](const MetricsRecord& r) { resumed.push_back(metrics_line(r)); });
    CHECK(resumed == a);
  }

  TEST_CASE("masked pendulum with history runs") {
    AgentConfig c = tiny_config();
    c.env = "pendulum-masked";
    c.history_len = 3;
    c.total_steps = 300;
    const auto records = run_online(c);
    CHECK(records.size() == 1);
    CHECK(std::isfinite(records[0].eval_return_mean));
  }

  TEST_CASE("tabular environments run through the agent with every bonus") {
    for (const char* bonus : {"off", "elliptical", "kernel"}) {
      AgentConfig c = tiny_config();
      c.env = "chain";
      c.total_steps = 400;
      c.bonus = exploration::parse_bonus_mode(bonus);
      const auto records = run_online(c);
      CHECK(records.size() == 2);
      CHECK(records.back().bonus_mean.has_value() == (c.bonus != exploration::BonusMode::off));
    }
  }
}
