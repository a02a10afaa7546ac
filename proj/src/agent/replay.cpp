#include "diffsr/agent/replay.hpp"

#include <algorithm>
#include <cmath>

namespace diffsr::agent {

ReplayBuffer::ReplayBuffer(std::size_t capacity, Eigen::Index obs_dim, Eigen::Index action_dim)
    : capacity_(capacity), obs_dim_(obs_dim), action_dim_(action_dim) {
  if (capacity == 0) throw ConfigError("buffer_capacity must be positive");
  if (obs_dim < 1 || action_dim < 1) throw DimensionError("ReplayBuffer: dimensions must be positive");
}

std::size_t ReplayBuffer::slot(std::size_t i) const {
  return size_ < capacity_ ? i : (cursor_ + i) % capacity_;
}

void ReplayBuffer::push(const envs::Transition& t) {
  require_length(t.s, obs_dim_, "replay_push s");
  require_length(t.a, action_dim_, "replay_push a");
  require_length(t.s_next, obs_dim_, "replay_push s'");
  if (!std::isfinite(t.r)) throw PoisonError("replay_push: non-finite reward");
  const auto od = static_cast<std::size_t>(obs_dim_);
  const auto ad = static_cast<std::size_t>(action_dim_);
  if (size_ < capacity_) {
    s_.insert(s_.end(), t.s.data(), t.s.data() + od);
    a_.insert(a_.end(), t.a.data(), t.a.data() + ad);
    s_next_.insert(s_next_.end(), t.s_next.data(), t.s_next.data() + od);
    r_.push_back(t.r);
    done_.push_back(t.done ? 1.0 : 0.0);
    ++size_;
  } else {
    std::copy_n(t.s.data(), od, s_.begin() + static_cast<std::ptrdiff_t>(cursor_ * od));
    std::copy_n(t.a.data(), ad, a_.begin() + static_cast<std::ptrdiff_t>(cursor_ * ad));
    std::copy_n(t.s_next.data(), od, s_next_.begin() + static_cast<std::ptrdiff_t>(cursor_ * od));
    r_[cursor_] = t.r;
    done_[cursor_] = t.done ? 1.0 : 0.0;
  }
  cursor_ = (cursor_ + 1) % capacity_;
}

envs::Transition ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw ContractError("ReplayBuffer::at: index out of range");
  const std::size_t k = slot(i);
  envs::Transition t;
  t.s = Eigen::Map<const Vector>(s_.data() + k * obs_dim_, obs_dim_);
  t.a = Eigen::Map<const Vector>(a_.data() + k * action_dim_, action_dim_);
  t.s_next = Eigen::Map<const Vector>(s_next_.data() + k * obs_dim_, obs_dim_);
  t.r = r_[k];
  t.done = done_[k] != 0.0;
  return t;
}

std::vector<std::size_t> ReplayBuffer::draw(std::size_t n, Rng& rng) const {
  if (size_ == 0) throw ContractError("replay_sample: buffer is empty");
  if (n == 0) throw ContractError("replay_sample: batch size must be positive");
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = rng.index(size_);
  return idx;
}

envs::TransitionBatch ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  const std::vector<std::size_t> idx = draw(n, rng);
  const auto cols = static_cast<Eigen::Index>(n);
  envs::TransitionBatch b{Batch(obs_dim_, cols), Batch(action_dim_, cols), Vector(cols), Batch(obs_dim_, cols),
                          Vector(cols)};
  for (Eigen::Index k = 0; k < cols; ++k) {
    const std::size_t i = idx[static_cast<std::size_t>(k)];
    b.s.col(k) = Eigen::Map<const Vector>(s_.data() + i * obs_dim_, obs_dim_);
    b.a.col(k) = Eigen::Map<const Vector>(a_.data() + i * action_dim_, action_dim_);
    b.s_next.col(k) = Eigen::Map<const Vector>(s_next_.data() + i * obs_dim_, obs_dim_);
    b.r(k) = r_[i];
    b.done(k) = done_[i];
  }
  return b;
}

envs::DynamicsBatch ReplayBuffer::sample_dynamics(std::size_t n, Rng& rng) const {
  const std::vector<std::size_t> idx = draw(n, rng);
  const auto cols = static_cast<Eigen::Index>(n);
  envs::DynamicsBatch b{Batch(obs_dim_, cols), Batch(action_dim_, cols), Batch(obs_dim_, cols)};
  for (Eigen::Index k = 0; k < cols; ++k) {
    const std::size_t i = idx[static_cast<std::size_t>(k)];
    b.s.col(k) = Eigen::Map<const Vector>(s_.data() + i * obs_dim_, obs_dim_);
    b.a.col(k) = Eigen::Map<const Vector>(a_.data() + i * action_dim_, action_dim_);
    b.s_next.col(k) = Eigen::Map<const Vector>(s_next_.data() + i * obs_dim_, obs_dim_);
  }
  return b;
}

void ReplayBuffer::save(TensorArchive& ar) const {
  const auto n = static_cast<std::int64_t>(size_);
  ar.put("buffer.s", {n, obs_dim_}, s_);
  ar.put("buffer.a", {n, action_dim_}, a_);
  ar.put("buffer.s_next", {n, obs_dim_}, s_next_);
  ar.put("buffer.r", {n}, r_);
  ar.put("buffer.done", {n}, done_);
  ar.put("buffer.meta", {3}, std::vector<double>{static_cast<double>(capacity_), static_cast<double>(size_),
                                                 static_cast<double>(cursor_)});
}

void ReplayBuffer::load(const TensorArchive& ar) {
  std::vector<double> meta(3);
  ar.read_into("buffer.meta", meta);
  if (static_cast<std::size_t>(meta[0]) != capacity_)
    throw DimensionError("buffer checkpoint: capacity " + std::to_string(static_cast<std::size_t>(meta[0])) +
                         " vs configured " + std::to_string(capacity_));
  const auto n = static_cast<std::size_t>(meta[1]);
  s_.assign(n * obs_dim_, 0.0);
  a_.assign(n * action_dim_, 0.0);
  s_next_.assign(n * obs_dim_, 0.0);
  r_.assign(n, 0.0);
  done_.assign(n, 0.0);
  ar.read_into("buffer.s", s_);
  ar.read_into("buffer.a", a_);
  ar.read_into("buffer.s_next", s_next_);
  ar.read_into("buffer.r", r_);
  ar.read_into("buffer.done", done_);
  size_ = n;
  cursor_ = static_cast<std::size_t>(meta[2]);
}

}  // namespace diffsr::agent
