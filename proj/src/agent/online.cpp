#include "diffsr/agent/online.hpp"

#include <cmath>
#include <json.hpp>

#include "diffsr/envs/registry.hpp"

namespace diffsr::agent {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void put_views(TensorArchive& ar, const std::string& prefix, const std::vector<ParamView>& views) {
  for (const ParamView& v : views)
    ar.put(prefix + "." + v.name, {static_cast<std::int64_t>(v.data.size())}, v.data);
}

void get_views(const TensorArchive& ar, const std::string& prefix, const std::vector<ParamView>& views) {
  for (const ParamView& v : views) ar.read_into(prefix + "." + v.name, v.data);
}

void put_adam(TensorArchive& ar, const std::string& prefix, AdamState& opt) {
  std::vector<ParamView> moments = opt.moment_views();
  for (std::size_t i = 0; i < moments.size(); ++i)
    ar.put(prefix + ".m" + std::to_string(i), {static_cast<std::int64_t>(moments[i].data.size())},
           moments[i].data);
  ar.put(prefix + ".steps", {1}, std::vector<double>{static_cast<double>(opt.steps())});
}

void get_adam(const TensorArchive& ar, const std::string& prefix, AdamState& opt) {
  std::vector<ParamView> moments = opt.moment_views();
  for (std::size_t i = 0; i < moments.size(); ++i) ar.read_into(prefix + ".m" + std::to_string(i), moments[i].data);
  std::vector<double> steps(1);
  ar.read_into(prefix + ".steps", steps);
  opt.set_steps(static_cast<std::int64_t>(steps[0]));
}

std::vector<Eigen::Index> widths(Eigen::Index width, int depth) {
  return std::vector<Eigen::Index>(static_cast<std::size_t>(depth), width);
}

}  // namespace

void AgentConfig::validate() const {
  require(envs::is_known_environment(env), "unknown environment '" + env + "'");
  require(history_len >= 1, "history_len must be >= 1");
  require(total_steps >= 0, "total_steps must be >= 0");
  require(buffer_capacity >= 1, "buffer_capacity must be >= 1");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(noise_levels >= 2, "noise_levels must be >= 2");
  require(beta_min > 0.0 && beta_min < beta_max && beta_max < 1.0, "beta bounds must satisfy 0 < beta_min < beta_max < 1");
  require(feature_dim >= 1 && fourier_dim >= 1 && repr_dim >= 1, "representation dimensions must be >= 1");
  require(psi_width >= 1 && zeta_width >= 1 && actor_width >= 1, "network widths must be >= 1");
  require(psi_depth >= 0 && zeta_depth >= 0 && actor_depth >= 0, "network depths must be >= 0");
  require(feature_update_ratio >= 1, "feature_update_ratio must be >= 1");
  require(rep_steps >= 0, "rep_steps must be >= 0");
  require(norm_weight >= 0.0, "norm_weight must be >= 0");
  require(bonus_scale >= 0.0, "bonus_scale must be >= 0");
  require(bonus_lambda > 0.0, "bonus_lambda must be > 0");
  require(kernel_cap >= 1, "kernel_cap must be >= 1");
  require(lr_actor > 0.0 && lr_critic > 0.0 && lr_repr > 0.0, "learning rates must be > 0");
  require(gamma >= 0.0 && gamma < 1.0, "gamma must lie in [0,1)");
  require(tau >= 0.0 && tau <= 1.0, "tau must lie in [0,1]");
  require(temperature >= 0.0, "temperature must be >= 0");
  require(eval_interval >= 1, "eval_interval must be >= 1");
  require(eval_episodes >= 1, "eval_episodes must be >= 1");
  require(warmup_steps >= 0, "warmup_steps must be >= 0");
}

std::string metrics_line(const MetricsRecord& r) {
  auto opt = [](const std::optional<double>& x) { return x ? nlohmann::json(*x) : nlohmann::json(nullptr); };
  nlohmann::ordered_json j;
  j["step"] = r.step;
  j["eval_return_mean"] = r.eval_return_mean;
  j["eval_return_std"] = r.eval_return_std;
  j["diff_loss"] = opt(r.diff_loss);
  j["critic_loss"] = opt(r.critic_loss);
  j["actor_loss"] = opt(r.actor_loss);
  j["bonus_mean"] = opt(r.bonus_mean);
  return j.dump();
}

OnlineAgent::OnlineAgent(AgentConfig config)
    : config_(std::move(config)),
      env_((config_.validate(), envs::make_environment(config_.env, config_.history_len))),
      buffer_(static_cast<std::size_t>(config_.buffer_capacity), env_->spec().obs_dim, env_->spec().action_dim),
      env_rng_(Rng::derive(config_.seed, 1)),
      act_rng_(Rng::derive(config_.seed, 2)),
      update_rng_(Rng::derive(config_.seed, 3)),
      repr_rng_(Rng::derive(config_.seed, 4)),
      bonus_rng_(Rng::derive(config_.seed, 5)) {
  const envs::EnvSpec& spec = env_->spec();
  Rng init = Rng::derive(config_.seed, 0);
  schedule_ = diffusion::make_noise_schedule(config_.noise_levels, config_.beta_min, config_.beta_max);
  sp_ = diffusion::ScorePair::create({.state_dim = spec.obs_dim,
                                      .action_dim = spec.action_dim,
                                      .feature_dim = config_.feature_dim,
                                      .psi_width = config_.psi_width,
                                      .psi_depth = config_.psi_depth,
                                      .zeta_width = config_.zeta_width,
                                      .zeta_depth = config_.zeta_depth},
                                     init);
  sp_opt_ = diffusion::ScorePairOptimizer(sp_, config_.lr_repr);
  critic_ = Critic::create(config_.feature_dim, config_.fourier_dim, config_.repr_dim, init);
  critic_opt_ = CriticOptimizer(critic_, config_.lr_critic, config_.lr_repr);
  policy_ = Policy::create(spec.obs_dim, spec.action_low, spec.action_high,
                           widths(config_.actor_width, config_.actor_depth), init);
  actor_opt_ = AdamState(AdamConfig{.learning_rate = config_.lr_actor}, policy_.net().parameters());
  switch (config_.bonus) {
    case exploration::BonusMode::off: bonus_ = exploration::BonusState::off(); break;
    case exploration::BonusMode::elliptical:
      bonus_ = exploration::BonusState::elliptical(config_.repr_dim, config_.bonus_lambda);
      break;
    case exploration::BonusMode::kernel:
      bonus_ = exploration::BonusState::kernel(config_.feature_dim, config_.bonus_lambda,
                                               static_cast<std::size_t>(config_.kernel_cap));
      break;
  }
  obs_ = env_->reset(env_rng_);
}

void OnlineAgent::run(std::int64_t target_step, const Sink& sink) {
  while (step_ < target_step) {
    try {
      env_step();
      if (step_ > config_.warmup_steps && buffer_.size() >= static_cast<std::size_t>(config_.batch_size)) update();
    } catch (const PoisonError& e) {
      throw PoisonError("step " + std::to_string(step_) + ": " + e.what());
    } catch (const NumericError& e) {
      throw NumericError("step " + std::to_string(step_) + ": " + e.what());
    }
    if (step_ % config_.eval_interval == 0 && sink) sink(take_record());
  }
}

void OnlineAgent::env_step() {
  const envs::EnvSpec& spec = env_->spec();
  Vector action(spec.action_dim);
  if (step_ < config_.warmup_steps) {
    for (Eigen::Index j = 0; j < spec.action_dim; ++j)
      action(j) = act_rng_.uniform(spec.action_low(j), spec.action_high(j));
  } else {
    action = policy_.act(obs_, act_rng_);
  }
  const envs::StepResult res = env_->step(action, env_rng_);
  buffer_.push({obs_, action, res.reward, res.observation, res.done});

  if (bonus_.mode() != exploration::BonusMode::off) {
    const Batch psi = sp_.psi_features(Batch(obs_), Batch(action), Exec::serial);
    if (bonus_.mode() == exploration::BonusMode::elliptical)
      bonus_.ellipse().update(critic_.target_head[0].apply(psi, Exec::serial).col(0));
    else
      bonus_.kernel_store().add(psi.col(0), bonus_rng_);
  }

  ++step_;
  ++episode_step_;
  if (res.done || episode_step_ >= spec.horizon) {
    obs_ = env_->reset(env_rng_);
    episode_step_ = 0;
  } else {
    obs_ = res.observation;
  }
}

Vector OnlineAgent::reward_bonus(const envs::TransitionBatch& batch) const {
  if (bonus_.mode() == exploration::BonusMode::off || config_.bonus_scale == 0.0) return Vector();
  const Batch psi = sp_.psi_features(batch.s, batch.a);
  const Vector b = bonus_.mode() == exploration::BonusMode::elliptical
                       ? bonus_.ellipse().bonus(critic_.target_head[0].apply(psi))
                       : bonus_.kernel_store().bonus(psi);
  return config_.bonus_scale * b.cwiseSqrt();
}

void OnlineAgent::update() {
  if (critic_updates_ % config_.feature_update_ratio == 0 && config_.rep_steps > 0) {
    const diffusion::ReprTrainConfig rc{.steps = config_.rep_steps,
                                        .batch_size = config_.batch_size,
                                        .norm_weight = config_.norm_weight,
                                        .learning_rate = config_.lr_repr};
    const auto stats = diffusion::train_representation(buffer_, sp_, &critic_.head[0], schedule_, rc, sp_opt_,
                                                       repr_rng_);
    for (const auto& s : stats) diff_acc_.add(s.diff_loss);
  }
  ++critic_updates_;

  const envs::TransitionBatch batch = buffer_.sample(static_cast<std::size_t>(config_.batch_size), update_rng_);
  const Vector bonus = reward_bonus(batch);
  if (bonus.size() > 0) bonus_acc_.add(bonus.mean());
  const CriticStats cs = critic_update(batch, critic_, sp_, policy_, config_.gamma, config_.temperature, bonus,
                                       critic_opt_, update_rng_);
  critic_acc_.add(cs.loss);
  const ActorLoss al = actor_update(policy_, actor_opt_, batch.s, CriticActionValue(critic_, sp_),
                                    config_.temperature, update_rng_);
  actor_acc_.add(al.loss);
  soft_update(critic_, config_.tau);
}

EvalResult OnlineAgent::evaluate(int episodes) const {
  EvalResult out;
  out.returns.assign(static_cast<std::size_t>(episodes), 0.0);
  const std::uint64_t stream = static_cast<std::uint64_t>(step_);
#pragma omp parallel for schedule(static)
  for (int e = 0; e < episodes; ++e) {
    std::unique_ptr<envs::Environment> env = envs::make_environment(config_.env, config_.history_len);
    Rng rng = Rng::derive(config_.seed ^ 0x9e3779b97f4a7c15ULL, stream * 1000003ULL + static_cast<std::uint64_t>(e));
    Vector obs = env->reset(rng);
    double total = 0.0;
    for (int t = 0; t < env->spec().horizon; ++t) {
      const envs::StepResult res = env->step(policy_.act_deterministic(obs), rng);
      total += res.reward;
      if (res.done) break;
      obs = res.observation;
    }
    out.returns[static_cast<std::size_t>(e)] = total;
  }
  const Eigen::Map<const Vector> r(out.returns.data(), episodes);
  out.mean = r.mean();
  out.std = std::sqrt((r.array() - out.mean).square().mean());
  return out;
}

MetricsRecord OnlineAgent::take_record() {
  const EvalResult ev = evaluate(config_.eval_episodes);
  MetricsRecord rec{step_, ev.mean, ev.std, diff_acc_.mean(), critic_acc_.mean(), actor_acc_.mean(),
                    bonus_acc_.mean()};
  diff_acc_ = critic_acc_ = actor_acc_ = bonus_acc_ = Accumulator{};
  return rec;
}

TensorArchive OnlineAgent::checkpoint() const {
  auto& self = const_cast<OnlineAgent&>(*this);
  TensorArchive ar;
  put_views(ar, "psi", self.sp_.psi.parameters());
  put_views(ar, "zeta", self.sp_.zeta.parameters());
  put_adam(ar, "opt.psi", self.sp_opt_.psi);
  put_adam(ar, "opt.zeta", self.sp_opt_.zeta);
  for (int i = 0; i < 2; ++i) {
    const std::string c = "critic" + std::to_string(i);
    put_views(ar, c + ".head", self.critic_.head[i].net().parameters());
    put_views(ar, c + ".target_head", self.critic_.target_head[i].net().parameters());
    ar.put(c + ".xi", critic_.xi[i]);
    ar.put(c + ".target_xi", critic_.target_xi[i]);
    put_adam(ar, "opt." + c + ".xi", self.critic_opt_.xi[i]);
    put_adam(ar, "opt." + c + ".head", self.critic_opt_.head[i]);
  }
  put_views(ar, "policy", self.policy_.net().parameters());
  put_adam(ar, "opt.policy", self.actor_opt_);
  buffer_.save(ar);
  bonus_.save(ar);
  ar.put("env.state", {static_cast<std::int64_t>(env_->save_state().size())}, env_->save_state());
  ar.put("env.obs", obs_);
  ar.put("loop.counters", {11},
         std::vector<double>{static_cast<double>(step_), static_cast<double>(critic_updates_),
                             static_cast<double>(episode_step_), diff_acc_.sum,
                             static_cast<double>(diff_acc_.count), critic_acc_.sum,
                             static_cast<double>(critic_acc_.count), actor_acc_.sum,
                             static_cast<double>(actor_acc_.count), bonus_acc_.sum,
                             static_cast<double>(bonus_acc_.count)});
  nlohmann::json& meta = ar.meta();
  meta["kind"] = "diffsr-agent";
  meta["env"] = config_.env;
  meta["history_len"] = config_.history_len;
  meta["bonus"] = exploration::to_string(config_.bonus);
  meta["noise_levels"] = config_.noise_levels;
  meta["beta_min"] = config_.beta_min;
  meta["beta_max"] = config_.beta_max;
  meta["rng"] = {{"env", env_rng_.save()},
                 {"act", act_rng_.save()},
                 {"update", update_rng_.save()},
                 {"repr", repr_rng_.save()},
                 {"bonus", bonus_rng_.save()}};
  return ar;
}

void OnlineAgent::restore(const TensorArchive& ar) {
  const nlohmann::json& meta = ar.meta();
  if (meta.value("kind", std::string()) != "diffsr-agent") throw ContractError("checkpoint: not an agent checkpoint");
  if (meta.value("env", std::string()) != config_.env || meta.value("history_len", 0) != config_.history_len ||
      meta.value("bonus", std::string()) != exploration::to_string(config_.bonus))
    throw ContractError("checkpoint: environment or bonus mode differs from the configuration");
  get_views(ar, "psi", sp_.psi.parameters());
  get_views(ar, "zeta", sp_.zeta.parameters());
  get_adam(ar, "opt.psi", sp_opt_.psi);
  get_adam(ar, "opt.zeta", sp_opt_.zeta);
  for (int i = 0; i < 2; ++i) {
    const std::string c = "critic" + std::to_string(i);
    get_views(ar, c + ".head", critic_.head[i].net().parameters());
    get_views(ar, c + ".target_head", critic_.target_head[i].net().parameters());
    ar.read_into(c + ".xi", critic_.xi[i]);
    ar.read_into(c + ".target_xi", critic_.target_xi[i]);
    get_adam(ar, "opt." + c + ".xi", critic_opt_.xi[i]);
    get_adam(ar, "opt." + c + ".head", critic_opt_.head[i]);
  }
  get_views(ar, "policy", policy_.net().parameters());
  get_adam(ar, "opt.policy", actor_opt_);
  buffer_.load(ar);
  bonus_.load(ar);
  env_->load_state(ar.get("env.state").values);
  ar.read_into("env.obs", obs_);
  std::vector<double> c(11);
  ar.read_into("loop.counters", c);
  step_ = static_cast<std::int64_t>(c[0]);
  critic_updates_ = static_cast<std::int64_t>(c[1]);
  episode_step_ = static_cast<std::int64_t>(c[2]);
  diff_acc_ = {c[3], static_cast<std::int64_t>(c[4])};
  critic_acc_ = {c[5], static_cast<std::int64_t>(c[6])};
  actor_acc_ = {c[7], static_cast<std::int64_t>(c[8])};
  bonus_acc_ = {c[9], static_cast<std::int64_t>(c[10])};
  const nlohmann::json& rng = meta.at("rng");
  env_rng_.load(rng.at("env").get<std::string>());
  act_rng_.load(rng.at("act").get<std::string>());
  update_rng_.load(rng.at("update").get<std::string>());
  repr_rng_.load(rng.at("repr").get<std::string>());
  bonus_rng_.load(rng.at("bonus").get<std::string>());
}

std::vector<MetricsRecord> run_online(const AgentConfig& config) {
  std::vector<MetricsRecord> records;
  OnlineAgent agent(config);
  agent.run(config.total_steps, [&](const MetricsRecord& r) { records.push_back(r); });
  return records;
}

}  // namespace diffsr::agent
