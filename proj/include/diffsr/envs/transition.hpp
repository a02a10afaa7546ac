#pragma once

#include "diffsr/numerics/linalg.hpp"
#include "diffsr/numerics/rng.hpp"

namespace diffsr::envs {

struct Transition {
  Vector s;
  Vector a;
  double r = 0.0;
  Vector s_next;
  bool done = false;
};

/// Column-per-sample batch of transitions.
struct TransitionBatch {
  Batch s;
  Batch a;
  Vector r;
  Batch s_next;
  Vector done;  // 1.0 for terminal transitions

  Eigen::Index size() const { return s.cols(); }
};

/// Dynamics-only view of a batch: what representation learning consumes.
struct DynamicsBatch {
  Batch s;
  Batch a;
  Batch s_next;

  Eigen::Index size() const { return s.cols(); }
};

/// Anything that can hand out uniformly sampled transitions.
class TransitionSource {
 public:
  virtual ~TransitionSource() = default;
  virtual std::size_t size() const = 0;
  virtual TransitionBatch sample(std::size_t n, Rng& rng) const = 0;
  /// Same index draws as sample(), but rewards and done flags are never touched.
  virtual DynamicsBatch sample_dynamics(std::size_t n, Rng& rng) const = 0;
};

}  // namespace diffsr::envs
