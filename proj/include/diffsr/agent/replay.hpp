#pragma once

#include <vector>

#include "diffsr/envs/transition.hpp"
#include "diffsr/numerics/archive.hpp"

namespace diffsr::agent {

/// Bounded ring of transitions. Once full, each push overwrites the oldest
/// record. Sampling is uniform with replacement.
class ReplayBuffer final : public envs::TransitionSource {
 public:
  ReplayBuffer(std::size_t capacity, Eigen::Index obs_dim, Eigen::Index action_dim);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const override { return size_; }
  std::size_t cursor() const { return cursor_; }
  Eigen::Index obs_dim() const { return obs_dim_; }
  Eigen::Index action_dim() const { return action_dim_; }

  void push(const envs::Transition& t);
  envs::Transition at(std::size_t i) const;  // i-th oldest record

  envs::TransitionBatch sample(std::size_t n, Rng& rng) const override;
  envs::DynamicsBatch sample_dynamics(std::size_t n, Rng& rng) const override;

  void save(TensorArchive& ar) const;
  void load(const TensorArchive& ar);

 private:
  std::vector<std::size_t> draw(std::size_t n, Rng& rng) const;
  std::size_t slot(std::size_t i) const;

  std::size_t capacity_;
  Eigen::Index obs_dim_;
  Eigen::Index action_dim_;
  std::size_t size_ = 0;
  std::size_t cursor_ = 0;  // next slot to write
  std::vector<double> s_, a_, r_, s_next_, done_;
};

inline void replay_push(ReplayBuffer& buffer, const envs::Transition& t) { buffer.push(t); }
inline envs::TransitionBatch replay_sample(const ReplayBuffer& buffer, std::size_t n, Rng& rng) {
  return buffer.sample(n, rng);
}

}  // namespace diffsr::agent
