#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace diffsr::app {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ScoreRecoveryOptions {
  Eigen::Index state_dim = 4;
  Eigen::Index action_dim = 2;
  double sigma0 = 0.7;
  Eigen::Index feature_dim = 16;
  Eigen::Index width = 128;
  std::size_t transitions = 100000;
  int train_steps = 20000;
  int batch_size = 512;
  double learning_rate = 1e-3;
  double final_learning_rate = 1e-5;
  std::size_t held_out = 2000;
  double threshold = 0.1;
  double time_limit_seconds = 300.0;
  std::uint64_t seed = 11;
};

/// Score-matching training on the linear-Gaussian MDP, scored against the analytic score
/// at the lowest decile of noise levels.
CheckResult check_score_recovery(const ScoreRecoveryOptions& options = {});

/// Cosine similarity between the gradients of the posterior-matching and the
/// score-matching objectives under common random numbers.
CheckResult check_loss_equivalence(std::size_t samples = 100000, double threshold = 0.99);

CheckResult check_tweedie(std::size_t tuples = 1000, double tol = 1e-10);
CheckResult check_spectral_identity(Eigen::Index features = 8192, double tol = 0.05);
CheckResult check_partition_linear(Eigen::Index features = 8192, double tol = 0.05);
CheckResult check_rff(Eigen::Index features = 4096, std::size_t pairs = 100, double tol = 0.05);

/// Finite differences against every analytic gradient: diff_loss, norm_loss,
/// the critic loss and the actor loss with frozen noise.
CheckResult check_gradients(double tol = 1e-4);

CheckResult check_tabular_td(double tol = 0.01);
CheckResult check_dp_consistency(double tol = 1e-8);

CheckResult check_sherman_morrison(int sequences = 100, double tol = 1e-8);
CheckResult check_bonus_properties(int instances = 1000);
CheckResult check_bonus_values();

struct NamedCheck {
  std::string name;
  std::function<CheckResult()> run;
};

/// Every check with its default parameters, in a fixed order.
std::vector<NamedCheck> check_registry();

}  // namespace diffsr::app
