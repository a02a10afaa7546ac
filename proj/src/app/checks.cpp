#include "diffsr/app/checks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "diffsr/agent/critic.hpp"
#include "diffsr/agent/policy.hpp"
#include "diffsr/agent/replay.hpp"
#include "diffsr/agent/tabular_td.hpp"
#include "diffsr/diffusion/losses.hpp"
#include "diffsr/diffusion/trainer.hpp"
#include "diffsr/envs/linear_gaussian.hpp"
#include "diffsr/exploration/bonus.hpp"
#include "diffsr/oracles/dynamic_programming.hpp"
#include "diffsr/oracles/finite_diff.hpp"
#include "diffsr/oracles/gaussian.hpp"
#include "diffsr/spectral/validators.hpp"

namespace diffsr::app {
namespace {

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

CheckResult result(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

template <class... Lists>
std::vector<ParamView> concat(Lists&&... lists) {
  std::vector<ParamView> out;
  (out.insert(out.end(), lists.begin(), lists.end()), ...);
  return out;
}

ParamView view_of(const std::string& name, Vector& v) { return {name, std::span<double>(v.data(), v.size())}; }

Vector uniform_vector(Eigen::Index n, double lo, double hi, Rng& rng) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
  return v;
}

Matrix random_policy(int states, int actions, Rng& rng) {
  Matrix pi(states, actions);
  for (int s = 0; s < states; ++s) {
    for (int a = 0; a < actions; ++a) pi(s, a) = 0.2 + rng.uniform();
    pi.row(s) /= pi.row(s).sum();
  }
  return pi;
}

}  // namespace

CheckResult check_score_recovery(const ScoreRecoveryOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng = Rng::derive(o.seed, 0);
  const auto env = envs::LinearGaussianMdp::standard(o.state_dim, o.action_dim, o.sigma0);
  agent::ReplayBuffer buffer(o.transitions, o.state_dim, o.action_dim);
  for (std::size_t i = 0; i < o.transitions; ++i) {
    envs::Transition t;
    t.s = rng.normal_vector(o.state_dim);
    t.a = uniform_vector(o.action_dim, -1.0, 1.0, rng);
    t.s_next = env.sample_next(t.s, t.a, rng);
    buffer.push(t);
  }

  diffusion::ScorePairConfig sc;
  sc.state_dim = o.state_dim;
  sc.action_dim = o.action_dim;
  sc.feature_dim = o.feature_dim;
  sc.psi_width = o.width;
  sc.zeta_width = o.width;
  diffusion::ScorePair sp = diffusion::ScorePair::create(sc, rng);
  const auto schedule = diffusion::make_noise_schedule(1000, 1e-4, 0.02);
  diffusion::ReprTrainConfig tc;
  tc.steps = o.train_steps;
  tc.batch_size = o.batch_size;
  tc.learning_rate = o.learning_rate;
  tc.final_learning_rate = o.final_learning_rate;
  diffusion::ScorePairOptimizer opt(sp, o.learning_rate);
  const auto stats = diffusion::train_representation(buffer, sp, nullptr, schedule, tc, opt, rng);

  const Eigen::Index n = static_cast<Eigen::Index>(o.held_out);
  const std::size_t decile = std::max<std::size_t>(1, schedule.size() / 10);
  Batch s(o.state_dim, n), a(o.action_dim, n), st(o.state_dim, n);
  Vector beta(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    s.col(k) = rng.normal_vector(o.state_dim);
    a.col(k) = uniform_vector(o.action_dim, -1.0, 1.0, rng);
    beta(k) = schedule[rng.index(decile)];
    st.col(k) = diffusion::corrupt(env.sample_next(s.col(k), a.col(k), rng), beta(k), rng);
  }
  const Batch learned = sp.score(s, a, st, beta);
  double total = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Vector truth = oracles::analytic_score_gaussian(env, s.col(k), a.col(k), st.col(k), beta(k));
    total += (learned.col(k) - truth).norm() / truth.norm();
  }
  const double err = total / static_cast<double>(n);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result("score_recovery", err < o.threshold && seconds < o.time_limit_seconds,
                fmt("mean relative error %.4f (limit %.2f), final diff_loss %.5f", err, o.threshold,
                    stats.back().diff_loss) +
                    fmt(", %.1f s", seconds));
}

CheckResult check_loss_equivalence(std::size_t samples, double threshold) {
  Rng rng = Rng::derive(23, 0);
  const Eigen::Index d = 2, k = 1, n = static_cast<Eigen::Index>(samples);
  const auto env = envs::LinearGaussianMdp::standard(d, k, 0.7);
  diffusion::ScorePairConfig sc;
  sc.state_dim = d;
  sc.action_dim = k;
  sc.feature_dim = 8;
  sc.psi_width = 32;
  sc.zeta_width = 32;
  const diffusion::ScorePair sp = diffusion::ScorePair::create(sc, rng);
  const auto schedule = diffusion::make_noise_schedule(1000, 1e-4, 0.02);

  envs::DynamicsBatch batch{rng.normal_matrix(d, n), Batch(k, n), Batch(d, n)};
  for (Eigen::Index c = 0; c < n; ++c) {
    batch.a.col(c) = uniform_vector(k, -1.0, 1.0, rng);
    batch.s_next.col(c) = env.sample_next(batch.s.col(c), batch.a.col(c), rng);
  }
  const auto draws = diffusion::sample_corruption(n, d, schedule, rng);
  const Batch st = diffusion::corrupt_batch(batch.s_next, draws);
  Batch posterior(d, n);
  for (Eigen::Index c = 0; c < n; ++c)
    posterior.col(c) =
        oracles::posterior_mean_gaussian(env, batch.s.col(c), batch.a.col(c), st.col(c), draws.beta(c));

  auto flat = [](diffusion::DenoisingLoss& l) {
    std::vector<double> out;
    for (const auto& v : concat(l.grad.psi.views(), l.grad.zeta.views())) out.insert(out.end(), v.data.begin(), v.data.end());
    return Eigen::Map<Vector>(out.data(), static_cast<Eigen::Index>(out.size())).eval();
  };
  auto score_matching = diffusion::diff_loss(sp, batch, draws);
  auto matching = diffusion::posterior_matching_loss(sp, batch.s, batch.a, st, draws.beta, posterior);
  const Vector g1 = flat(score_matching), g2 = flat(matching);
  const double cosine = g1.dot(g2) / (g1.norm() * g2.norm());
  return result("loss_equivalence", cosine > threshold,
                fmt("gradient cosine %.6f over %.0f samples (limit %.2f)", cosine, static_cast<double>(samples),
                    threshold));
}

CheckResult check_tweedie(std::size_t tuples, double tol) {
  Rng rng = Rng::derive(29, 0);
  double worst = 0.0;
  for (std::size_t i = 0; i < tuples; ++i) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.index(6));
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng.index(3));
    const auto env = envs::LinearGaussianMdp::standard(d, k, rng.uniform(0.1, 2.0), rng.next_u64());
    const Vector s = rng.normal_vector(d), a = rng.normal_vector(k), st = 2.0 * rng.normal_vector(d);
    const double beta = rng.uniform(1e-6, 1.0 - 1e-6);
    const Vector residual = st + beta * oracles::analytic_score_gaussian(env, s, a, st, beta) -
                            std::sqrt(1.0 - beta) * oracles::posterior_mean_gaussian(env, s, a, st, beta);
    worst = std::max(worst, residual.cwiseAbs().maxCoeff());
  }
  return result("tweedie", worst < tol, fmt("max residual %.3g over %.0f tuples", worst, static_cast<double>(tuples)));
}

CheckResult check_spectral_identity(Eigen::Index features, double tol) {
  Rng rng = Rng::derive(31, 0);
  const spectral::Domain1D domain;
  const auto samples = spectral::random_samples(200, domain, rng);
  double worst = 0.0;
  for (const auto& fact : {spectral::smooth_fixture(), spectral::zero_psi_fixture()}) {
    const auto bank = spectral::RffBank::sample(features, fact.dim, rng);
    worst = std::max(worst, spectral::verify_spectral_identity(fact, bank, samples, domain));
  }
  return result("spectral_identity", worst < tol,
                fmt("worst relative error %.4f with N=%.0f", worst, static_cast<double>(features)));
}

CheckResult check_partition_linear(Eigen::Index features, double tol) {
  Rng rng = Rng::derive(37, 0);
  const spectral::Domain1D domain;
  const auto pairs = spectral::random_pairs(100, rng);
  double worst = 0.0;
  for (const auto& fact : {spectral::smooth_fixture(), spectral::zero_psi_fixture()}) {
    const auto bank = spectral::RffBank::sample(features, fact.dim, rng);
    worst = std::max(worst, spectral::partition_linear_check(fact, bank, pairs, domain));
  }
  return result("partition_linear", worst < tol,
                fmt("worst relative error %.4f with N=%.0f", worst, static_cast<double>(features)));
}

CheckResult check_rff(Eigen::Index features, std::size_t pairs, double tol) {
  Rng rng = Rng::derive(41, 0);
  const Eigen::Index m = 4;
  const auto bank = spectral::RffBank::sample(features, m, rng);
  double worst = 0.0, diag = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const Vector x = rng.normal_vector(m);
    Vector dir = rng.normal_vector(m);
    const Vector y = x + dir.normalized() * rng.uniform(0.0, 4.0);
    worst = std::max(worst, std::abs(spectral::rff_kernel_estimate(bank, x, y) - spectral::gaussian_kernel(x, y)));
    diag = std::max(diag, std::abs(spectral::rff_kernel_estimate(bank, x, x) - 1.0));
  }
  return result("rff", worst < tol && diag == 0.0,
                fmt("max |k_hat - k| %.4f over %.0f pairs, max |k_hat(x,x) - 1| %.3g", worst,
                    static_cast<double>(pairs), diag));
}

CheckResult check_gradients(double tol) {
  Rng rng = Rng::derive(43, 0);
  const Eigen::Index d = 2, k = 1, n = 6, m = 3;
  diffusion::ScorePairConfig sc;
  sc.state_dim = d;
  sc.action_dim = k;
  sc.feature_dim = m;
  sc.psi_width = 5;
  sc.zeta_width = 5;
  diffusion::ScorePair sp = diffusion::ScorePair::create(sc, rng);
  const auto schedule = diffusion::make_noise_schedule(10, 0.05, 0.5);
  const envs::DynamicsBatch dyn{rng.normal_matrix(d, n), rng.normal_matrix(k, n), rng.normal_matrix(d, n)};
  const auto draws = diffusion::sample_corruption(n, d, schedule, rng);

  std::string detail;
  double worst = 0.0;
  auto record = [&](const std::string& what, const oracles::FiniteDiffReport& r) {
    worst = std::max(worst, r.max_relative_error);
    detail += (detail.empty() ? "" : ", ") + what + fmt(" %.2e", r.max_relative_error);
    if (r.max_relative_error >= tol) detail += " at " + r.worst;
  };

  {
    auto loss = diffusion::diff_loss(sp, dyn, draws, Exec::serial);
    record("diff_loss", oracles::finite_diff_check([&] { return diffusion::diff_loss(sp, dyn, draws, Exec::serial).loss; },
                                                   concat(sp.psi.parameters(), sp.zeta.parameters()),
                                                   concat(loss.grad.psi.views(), loss.grad.zeta.views())));
  }

  diffusion::ReprHead head = diffusion::ReprHead::create(m, 4, 3, rng);
  {
    auto loss = diffusion::norm_loss(sp, head, dyn.s, dyn.a, Exec::serial);
    record("norm_loss", oracles::finite_diff_check(
                            [&] { return diffusion::norm_loss(sp, head, dyn.s, dyn.a, Exec::serial).loss; },
                            concat(sp.psi.parameters(), head.net().parameters()),
                            concat(loss.psi.views(), loss.head.views())));
  }

  agent::Critic critic = agent::Critic::create(m, 4, 3, rng);
  for (auto& xi : critic.xi) xi = rng.normal_vector(3);
  Vector low(k), high(k);
  low.setConstant(-2.0);
  high.setConstant(2.0);
  agent::Policy policy = agent::Policy::create(d, low, high, {5}, rng);
  {
    const envs::TransitionBatch batch{dyn.s, dyn.a, rng.normal_vector(n), dyn.s_next, Vector::Zero(n)};
    const Batch next_eps = rng.normal_matrix(k, n);
    const Vector y = agent::td_targets(critic, sp, policy, batch, 0.9, 0.1, Vector(), next_eps, Exec::serial).y;
    const Batch psi = sp.psi_features(dyn.s, dyn.a, Exec::serial);
    auto loss = agent::critic_loss(critic, psi, y, Exec::serial);
    record("critic_loss",
           oracles::finite_diff_check([&] {
                                        const auto l = agent::critic_loss(critic, psi, y, Exec::serial);
                                        return l.per_critic[0] + l.per_critic[1];
                                      },
                                      concat(std::vector{view_of("xi1", critic.xi[0]), view_of("xi2", critic.xi[1])},
                                             critic.head[0].net().parameters(), critic.head[1].net().parameters()),
                                      concat(std::vector{view_of("dxi1", loss.dxi[0]), view_of("dxi2", loss.dxi[1])},
                                             loss.dhead[0].views(), loss.dhead[1].views())));
  }
  {
    const Batch eps = rng.normal_matrix(k, n);
    const agent::CriticActionValue q(critic, sp, Exec::serial);
    auto loss = agent::actor_loss(policy, dyn.s, eps, q, 0.1, Exec::serial);
    record("actor_loss", oracles::finite_diff_check(
                             [&] { return agent::actor_loss(policy, dyn.s, eps, q, 0.1, Exec::serial).loss; },
                             policy.net().parameters(), loss.grad.views()));
  }
  return result("gradients", worst < tol, detail);
}

CheckResult check_tabular_td(double tol) {
  Rng rng = Rng::derive(47, 0);
  const auto mdp = envs::make_chain(5, 0.9);
  const Matrix pi = random_policy(mdp.states(), mdp.actions(), rng);
  const Matrix exact = oracles::policy_eval_exact(mdp, pi, mdp.gamma);
  const Matrix td = agent::td_policy_evaluation(mdp, pi, mdp.gamma, {}, rng);
  const double err = ((td - exact).array().abs() / exact.array().abs()).maxCoeff();
  return result("tabular_td", err < tol, fmt("max relative error %.2e on the 5-state chain", err));
}

CheckResult check_dp_consistency(double tol) {
  Rng rng = Rng::derive(53, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto mdp = envs::make_random_mdp(6, 3, 0.9, rng);
    const Matrix q_star = oracles::value_iteration(mdp, mdp.gamma, tol / 10.0);
    const Matrix q_greedy = oracles::policy_eval_exact(mdp, oracles::greedy_policy(q_star), mdp.gamma);
    worst = std::max(worst, (q_star - q_greedy).cwiseAbs().maxCoeff());
  }
  const auto chain = envs::make_chain(3, 0.9);
  const double forward = oracles::value_iteration(chain, 0.9, 1e-12)(0, 1);
  const bool chain_ok = std::abs(forward - 8.1) < 1e-9;
  return result("dp_consistency", worst < tol && chain_ok,
                fmt("max |Q* - Q^greedy| %.2e over 20 random MDPs, chain Q(s0, forward) = %.10f", worst, forward));
}

CheckResult check_sherman_morrison(int sequences, double tol) {
  Rng rng = Rng::derive(59, 0);
  const Eigen::Index dim = 8;
  double worst = 0.0;
  for (int seq = 0; seq < sequences; ++seq) {
    const double lambda = rng.uniform(0.1, 2.0);
    exploration::EllipticalBonus bonus(dim, lambda);
    Matrix loaded = lambda * Matrix::Identity(dim, dim);
    const int updates = 1 + static_cast<int>(rng.index(200));
    for (int u = 0; u < updates; ++u) {
      const Vector phi = rng.normal_vector(dim);
      bonus.update(phi);
      loaded += phi * phi.transpose();
    }
    worst = std::max(worst, (bonus.inverse() - loaded.inverse()).cwiseAbs().maxCoeff());
  }
  return result("sherman_morrison", worst < tol,
                fmt("max |inverse - direct| %.2e over %.0f sequences", worst, static_cast<double>(sequences)));
}

CheckResult check_bonus_properties(int instances) {
  Rng rng = Rng::derive(61, 0);
  int failures = 0;
  for (int i = 0; i < instances; ++i) {
    const Eigen::Index dim = 1 + static_cast<Eigen::Index>(rng.index(8));
    const double lambda = rng.uniform(0.05, 3.0);

    exploration::EllipticalBonus ell(dim, lambda);
    const int stored = static_cast<int>(rng.index(30));
    for (int u = 0; u < stored; ++u) ell.update(rng.normal_vector(dim));
    const Vector phi = rng.normal_vector(dim);
    const double before = ell.bonus(phi);
    if (!(before > 0.0 && before <= phi.squaredNorm() / lambda * (1.0 + 1e-12))) ++failures;
    ell.update(phi);
    if (ell.bonus(phi) > before) ++failures;

    exploration::KernelBonus ker(dim, lambda, 4096);
    for (int u = 0; u < stored; ++u) ker.add(rng.normal_vector(dim), rng);
    const Vector psi = rng.normal_vector(dim);
    const double kb = ker.bonus(psi);
    if (!(kb >= 0.0 && kb <= 1.0)) ++failures;
    ker.add(psi, rng);
    if (ker.bonus(psi) > kb) ++failures;
  }
  return result("bonus_properties", failures == 0,
                fmt("%.0f violations over %.0f instances", failures, static_cast<double>(instances)));
}

CheckResult check_bonus_values() {
  Rng rng = Rng::derive(67, 0);
  const Eigen::Index dim = 4;
  const Vector e0 = Vector::Unit(dim, 0), e1 = Vector::Unit(dim, 1);

  exploration::EllipticalBonus ell(dim, 1.0);
  const double empty = ell.bonus(e0);
  ell.update(e0);
  const double once = ell.bonus(e0);

  const double lambda = 4.0;
  exploration::EllipticalBonus scaled(dim, lambda);
  const Vector other = 3.0 * e1;
  scaled.update(e0);
  scaled.update(2.0 * e0);
  const double orth = scaled.bonus(other);

  exploration::KernelBonus ker(dim, 1.0, 16);
  const double k_empty = ker.bonus(e0);
  ker.add(e0, rng);
  const double k_revisit = ker.bonus(e0);

  const bool ok = empty == 1.0 && once == 0.5 && orth == other.squaredNorm() / lambda && k_empty == 1.0 &&
                  k_revisit == 0.5;
  return result("bonus_values", ok,
                fmt("elliptical empty %.17g, after one update %.17g, orthogonal %.17g", empty, once, orth) +
                    fmt(", kernel empty %.17g, revisit %.17g", k_empty, k_revisit));
}

std::vector<NamedCheck> check_registry() {
  return {
      {"tweedie", [] { return check_tweedie(); }},
      {"loss_equivalence", [] { return check_loss_equivalence(); }},
      {"spectral_identity", [] { return check_spectral_identity(); }},
      {"partition_linear", [] { return check_partition_linear(); }},
      {"rff", [] { return check_rff(); }},
      {"gradients", [] { return check_gradients(); }},
      {"tabular_td", [] { return check_tabular_td(); }},
      {"dp_consistency", [] { return check_dp_consistency(); }},
      {"sherman_morrison", [] { return check_sherman_morrison(); }},
      {"bonus_properties", [] { return check_bonus_properties(); }},
      {"bonus_values", [] { return check_bonus_values(); }},
      {"score_recovery", [] { return check_score_recovery(); }},
  };
}

}  // namespace diffsr::app
