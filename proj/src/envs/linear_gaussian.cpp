#include "diffsr/envs/linear_gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

namespace diffsr::envs {

LinearGaussianMdp::LinearGaussianMdp(Matrix A, Matrix B, double sigma0, int horizon, double gamma)
    : A_(std::move(A)), B_(std::move(B)), sigma0_(sigma0) {
  if (A_.rows() != A_.cols()) throw DimensionError("LinearGaussianMdp: A must be square, got " + shape_string(A_));
  if (B_.rows() != A_.rows()) throw DimensionError("LinearGaussianMdp: B rows must match A");
  if (!(sigma0_ >= 0.0) || !std::isfinite(sigma0_)) throw ContractError("LinearGaussianMdp: sigma0 must be >= 0");
  const double radius = A_.eigenvalues().cwiseAbs().maxCoeff();
  if (radius > 1.0 + 1e-12)
    throw ContractError("LinearGaussianMdp: spectral radius of A is " + std::to_string(radius) + " > 1");
  spec_.name = "lingauss";
  spec_.obs_dim = A_.rows();
  spec_.action_dim = B_.cols();
  spec_.action_low = Vector::Constant(B_.cols(), -1.0);
  spec_.action_high = Vector::Constant(B_.cols(), 1.0);
  spec_.horizon = horizon;
  spec_.gamma = gamma;
  state_ = Vector::Zero(A_.rows());
}

LinearGaussianMdp LinearGaussianMdp::standard(Eigen::Index state_dim, Eigen::Index action_dim, double sigma0,
                                              std::uint64_t seed) {
  Rng rng(seed);
  Eigen::HouseholderQR<Matrix> qr(rng.normal_matrix(state_dim, state_dim));
  Matrix Q = qr.householderQ();
  Matrix B = rng.normal_matrix(state_dim, action_dim) * (0.5 / std::sqrt(static_cast<double>(action_dim)));
  return LinearGaussianMdp(0.9 * Q, B, sigma0);
}

Vector LinearGaussianMdp::reset(Rng& rng) {
  state_.resize(A_.rows());
  for (Eigen::Index i = 0; i < state_.size(); ++i) state_(i) = rng.uniform(-1.0, 1.0);
  return state_;
}

Vector LinearGaussianMdp::mean_next(const Vector& s, const Vector& a) const {
  require_length(s, A_.rows(), "LinearGaussianMdp state");
  require_length(a, B_.cols(), "LinearGaussianMdp action");
  return A_ * s + B_ * a;
}

Vector LinearGaussianMdp::sample_next(const Vector& s, const Vector& a, Rng& rng) const {
  return mean_next(s, a) + sigma0_ * rng.normal_vector(A_.rows());
}

StepResult LinearGaussianMdp::step(const Vector& action, Rng& rng) {
  const Vector a = clamp_action(spec_, action);
  StepResult out;
  out.reward = -(state_.squaredNorm() + 0.1 * a.squaredNorm());
  state_ = sample_next(state_, a, rng);
  out.observation = state_;
  return out;
}

std::vector<double> LinearGaussianMdp::save_state() const {
  return std::vector<double>(state_.data(), state_.data() + state_.size());
}

void LinearGaussianMdp::load_state(std::span<const double> state) {
  if (static_cast<Eigen::Index>(state.size()) != A_.rows())
    throw ContractError("LinearGaussianMdp::load_state: wrong length");
  state_ = Eigen::Map<const Vector>(state.data(), A_.rows());
}

void LinearGaussianMdp::set_state(const Vector& s) {
  require_length(s, A_.rows(), "LinearGaussianMdp::set_state");
  state_ = s;
}

double transition_logdensity(const LinearGaussianMdp& env, const Vector& s, const Vector& a,
                             const Vector& s_next) {
  if (env.sigma0() <= 0.0) throw NumericError("transition_logdensity: density undefined for sigma0 = 0");
  require_length(s_next, env.state_dim(), "transition_logdensity next state");
  const double var = env.sigma0() * env.sigma0();
  const double d = static_cast<double>(env.state_dim());
  const double sq = (s_next - env.mean_next(s, a)).squaredNorm();
  return -0.5 * d * std::log(2.0 * std::numbers::pi * var) - 0.5 * sq / var;
}

}  // namespace diffsr::envs
