#include "diffsr/envs/pomdp.hpp"

#include <algorithm>

namespace diffsr::envs {

Vector mask_velocity(const Vector& obs, const std::vector<Eigen::Index>& velocity_coords) {
  if (static_cast<Eigen::Index>(velocity_coords.size()) > obs.size())
    throw ContractError("mask_velocity: mask has " + std::to_string(velocity_coords.size()) +
                        " entries for a " + std::to_string(obs.size()) + "-dimensional observation");
  std::vector<bool> drop(static_cast<std::size_t>(obs.size()), false);
  for (Eigen::Index c : velocity_coords) {
    if (c < 0 || c >= obs.size()) throw ContractError("mask_velocity: coordinate out of range");
    drop[static_cast<std::size_t>(c)] = true;
  }
  const auto kept = std::count(drop.begin(), drop.end(), false);
  if (kept == 0) throw ContractError("mask_velocity: every coordinate is masked, observation would be empty");
  Vector out(kept);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < obs.size(); ++i)
    if (!drop[static_cast<std::size_t>(i)]) out(k++) = obs(i);
  return out;
}

HistoryWindow::HistoryWindow(int length, Eigen::Index obs_dim, Eigen::Index action_dim)
    : length_(length), obs_dim_(obs_dim), action_dim_(action_dim) {
  if (length < 1) throw ContractError("HistoryWindow: length must be >= 1");
}

Eigen::Index HistoryWindow::feature_dim() const {
  return (length_ - 1) * (obs_dim_ + action_dim_) + obs_dim_;
}

Vector HistoryWindow::reset(const Vector& first_obs) {
  require_length(first_obs, obs_dim_, "HistoryWindow observation");
  observations_.assign(static_cast<std::size_t>(length_), first_obs);
  actions_.assign(static_cast<std::size_t>(length_ - 1), Vector::Zero(action_dim_));
  return feature();
}

Vector HistoryWindow::push(const Vector& action_prev, const Vector& new_obs) {
  if (observations_.empty()) throw ContractError("HistoryWindow: push before reset");
  require_length(new_obs, obs_dim_, "HistoryWindow observation");
  require_length(action_prev, action_dim_, "HistoryWindow action");
  observations_.push_back(new_obs);
  observations_.pop_front();
  if (length_ > 1) {
    actions_.push_back(action_prev);
    actions_.pop_front();
  }
  return feature();
}

Vector HistoryWindow::feature() const {
  Vector x(feature_dim());
  Eigen::Index k = 0;
  for (int i = 0; i < length_; ++i) {
    x.segment(k, obs_dim_) = observations_[static_cast<std::size_t>(i)];
    k += obs_dim_;
    if (i + 1 < length_) {
      x.segment(k, action_dim_) = actions_[static_cast<std::size_t>(i)];
      k += action_dim_;
    }
  }
  return x;
}

std::vector<double> HistoryWindow::save_state() const {
  if (observations_.empty()) return {};
  const Vector x = feature();
  return std::vector<double>(x.data(), x.data() + x.size());
}

void HistoryWindow::load_state(std::span<const double> state) {
  if (state.empty()) {
    observations_.clear();
    actions_.clear();
    return;
  }
  if (static_cast<Eigen::Index>(state.size()) != feature_dim())
    throw ContractError("HistoryWindow::load_state: wrong length");
  observations_.clear();
  actions_.clear();
  Eigen::Index k = 0;
  for (int i = 0; i < length_; ++i) {
    observations_.push_back(Eigen::Map<const Vector>(state.data() + k, obs_dim_));
    k += obs_dim_;
    if (i + 1 < length_) {
      actions_.push_back(Eigen::Map<const Vector>(state.data() + k, action_dim_));
      k += action_dim_;
    }
  }
}

PartialObservationEnv::PartialObservationEnv(std::unique_ptr<Environment> inner, bool mask, int history_len)
    : inner_(std::move(inner)),
      mask_(mask ? inner_->spec().velocity_coords : std::vector<Eigen::Index>{}),
      window_(history_len, inner_->spec().obs_dim - static_cast<Eigen::Index>(mask_.size()),
              inner_->spec().action_dim) {
  if (mask && mask_.size() >= static_cast<std::size_t>(inner_->spec().obs_dim))
    throw ContractError("PartialObservationEnv: masking would leave no observation");
  spec_ = inner_->spec();
  spec_.name += mask ? "-masked" : "";
  spec_.obs_dim = window_.feature_dim();
  spec_.velocity_coords.clear();
}

PartialObservationEnv::PartialObservationEnv(const PartialObservationEnv& other)
    : inner_(other.inner_->clone()), mask_(other.mask_), window_(other.window_), spec_(other.spec_) {}

Vector PartialObservationEnv::observe(const Vector& full) const {
  return mask_.empty() ? full : mask_velocity(full, mask_);
}

Vector PartialObservationEnv::reset(Rng& rng) { return window_.reset(observe(inner_->reset(rng))); }

StepResult PartialObservationEnv::step(const Vector& action, Rng& rng) {
  const Vector a = clamp_action(spec_, action);
  StepResult out = inner_->step(a, rng);
  out.observation = window_.push(a, observe(out.observation));
  return out;
}

std::vector<double> PartialObservationEnv::save_state() const {
  std::vector<double> inner = inner_->save_state();
  std::vector<double> out{static_cast<double>(inner.size())};
  out.insert(out.end(), inner.begin(), inner.end());
  const std::vector<double> win = window_.save_state();
  out.insert(out.end(), win.begin(), win.end());
  return out;
}

void PartialObservationEnv::load_state(std::span<const double> state) {
  if (state.empty()) throw ContractError("PartialObservationEnv::load_state: empty state");
  const auto n = static_cast<std::size_t>(state[0]);
  if (state.size() < 1 + n) throw ContractError("PartialObservationEnv::load_state: truncated state");
  inner_->load_state(state.subspan(1, n));
  window_.load_state(state.subspan(1 + n));
}

}  // namespace diffsr::envs
