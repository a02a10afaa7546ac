#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "diffsr/agent/critic.hpp"
#include "diffsr/agent/policy.hpp"
#include "diffsr/agent/replay.hpp"
#include "diffsr/diffusion/trainer.hpp"
#include "diffsr/envs/environment.hpp"
#include "diffsr/exploration/bonus.hpp"

namespace diffsr::agent {

struct AgentConfig {
  std::string env = "pendulum";
  int history_len = 1;
  std::uint64_t seed = 0;
  std::int64_t total_steps = 30000;
  std::int64_t buffer_capacity = 1000000;
  int batch_size = 256;

  int noise_levels = 1000;
  double beta_min = 1e-4;
  double beta_max = 0.02;
  Eigen::Index feature_dim = 32;   // m
  Eigen::Index fourier_dim = 64;   // F
  Eigen::Index repr_dim = 256;     // d_φ
  Eigen::Index psi_width = 256;
  int psi_depth = 1;
  Eigen::Index zeta_width = 512;
  int zeta_depth = 1;
  int feature_update_ratio = 5;
  int rep_steps = 1;
  double norm_weight = 0.0;

  exploration::BonusMode bonus = exploration::BonusMode::elliptical;
  double bonus_scale = 0.1;
  double bonus_lambda = 1.0;
  std::int64_t kernel_cap = 4096;

  double lr_actor = 3e-3;
  double lr_critic = 3e-4;
  double lr_repr = 1e-4;
  double gamma = 0.99;
  double tau = 0.005;
  double temperature = 0.1;
  Eigen::Index actor_width = 256;
  int actor_depth = 2;

  std::int64_t eval_interval = 5000;
  int eval_episodes = 10;
  std::int64_t warmup_steps = 1000;

  /// Range checks; throws ConfigError naming the field.
  void validate() const;
};

struct MetricsRecord {
  std::int64_t step = 0;
  double eval_return_mean = 0.0;
  double eval_return_std = 0.0;
  std::optional<double> diff_loss;
  std::optional<double> critic_loss;
  std::optional<double> actor_loss;
  std::optional<double> bonus_mean;
};

/// One JSON object with the fixed key set; absent losses are null.
std::string metrics_line(const MetricsRecord& record);

struct EvalResult {
  double mean = 0.0;
  double std = 0.0;
  std::vector<double> returns;
};

/// Online RL with the diffusion representation: act, step, store, refresh ψ
/// and ζ by score matching, TD-update the critics, update the actor, move the
/// targets. Deterministic given the config.
class OnlineAgent {
 public:
  explicit OnlineAgent(AgentConfig config);

  const AgentConfig& config() const { return config_; }
  std::int64_t steps_done() const { return step_; }
  std::int64_t critic_updates() const { return critic_updates_; }

  using Sink = std::function<void(const MetricsRecord&)>;
  /// Advances to `target_step` environment steps, emitting a record at every
  /// evaluation boundary. Poisons are rethrown with the step index.
  void run(std::int64_t target_step, const Sink& sink);

  /// Deterministic-action rollouts on fresh environment copies; never touches
  /// training state.
  EvalResult evaluate(int episodes) const;

  TensorArchive checkpoint() const;
  void restore(const TensorArchive& archive);

  const diffusion::ScorePair& score_pair() const { return sp_; }
  const Critic& critic() const { return critic_; }
  const Policy& policy() const { return policy_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const exploration::BonusState& bonus() const { return bonus_; }
  const envs::Environment& environment() const { return *env_; }

 private:
  void env_step();
  void update();
  Vector reward_bonus(const envs::TransitionBatch& batch) const;
  MetricsRecord take_record();

  struct Accumulator {
    double sum = 0.0;
    std::int64_t count = 0;
    void add(double x) { sum += x, ++count; }
    std::optional<double> mean() const {
      return count ? std::optional<double>(sum / static_cast<double>(count)) : std::nullopt;
    }
  };

  AgentConfig config_;
  std::unique_ptr<envs::Environment> env_;
  diffusion::NoiseSchedule schedule_;
  diffusion::ScorePair sp_;
  diffusion::ScorePairOptimizer sp_opt_;
  Critic critic_;
  CriticOptimizer critic_opt_;
  Policy policy_;
  AdamState actor_opt_;
  exploration::BonusState bonus_;
  ReplayBuffer buffer_;

  Rng env_rng_;
  Rng act_rng_;
  Rng update_rng_;
  Rng repr_rng_;
  Rng bonus_rng_;

  Vector obs_;
  std::int64_t step_ = 0;
  std::int64_t critic_updates_ = 0;
  std::int64_t episode_step_ = 0;
  Accumulator diff_acc_, critic_acc_, actor_acc_, bonus_acc_;
};

/// Runs `config.total_steps` from scratch and returns the metrics stream.
std::vector<MetricsRecord> run_online(const AgentConfig& config);

}  // namespace diffsr::agent
