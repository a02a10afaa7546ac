#include "diffsr/oracles/dynamic_programming.hpp"

#include <cmath>

namespace diffsr::oracles {
namespace {

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ContractError("discount must lie in [0,1), got " + std::to_string(gamma));
}

}  // namespace

Matrix value_iteration(const envs::TabularMdp& mdp, double gamma, double tol) {
  check_gamma(gamma);
  if (!(tol > 0.0)) throw ContractError("value_iteration: tol must be positive");
  mdp.validate();
  const int S = mdp.states(), A = mdp.actions();
  Matrix q = Matrix::Zero(S, A);
  // |Q_k - Q*| <= γ/(1-γ) |Q_k - Q_{k-1}|
  const double stop = gamma > 0.0 ? tol * (1.0 - gamma) / gamma : 0.0;
  for (;;) {
    const Vector v = q.rowwise().maxCoeff();
    Matrix next(S, A);
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) next(s, a) = mdp.reward(s, a) + gamma * mdp.transition[s][a].dot(v);
    const double change = (next - q).cwiseAbs().maxCoeff();
    q = std::move(next);
    if (change <= stop) break;
  }
  return q;
}

Matrix policy_eval_exact(const envs::TabularMdp& mdp, const Matrix& policy, double gamma) {
  check_gamma(gamma);
  mdp.validate();
  const int S = mdp.states(), A = mdp.actions();
  require_shape(policy, S, A, "policy_eval_exact policy");
  for (int s = 0; s < S; ++s)
    if ((policy.row(s).array() < 0.0).any() || std::abs(policy.row(s).sum() - 1.0) > 1e-9)
      throw ContractError("policy_eval_exact: policy row " + std::to_string(s) + " is not a distribution");

  Matrix system = Matrix::Identity(S, S);
  Vector r_pi = Vector::Zero(S);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      r_pi(s) += policy(s, a) * mdp.reward(s, a);
      system.row(s) -= gamma * policy(s, a) * mdp.transition[s][a].transpose();
    }
  Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible()) throw NumericError("policy_eval_exact: singular evaluation system");
  const Vector v = lu.solve(r_pi);

  Matrix q(S, A);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) q(s, a) = mdp.reward(s, a) + gamma * mdp.transition[s][a].dot(v);
  return q;
}

Matrix greedy_policy(const Matrix& q) {
  Matrix pi = Matrix::Zero(q.rows(), q.cols());
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    Eigen::Index best = 0;
    for (Eigen::Index a = 1; a < q.cols(); ++a)
      if (q(s, a) > q(s, best)) best = a;
    pi(s, best) = 1.0;
  }
  return pi;
}

}  // namespace diffsr::oracles
