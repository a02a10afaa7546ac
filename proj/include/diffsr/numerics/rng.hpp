#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>

#include "diffsr/numerics/linalg.hpp"

namespace diffsr {

/// Seeded random stream. The normal generator is implemented here (polar
/// method with one cached deviate) so the full state round-trips through
/// save()/load() on any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  /// Derive an independent stream from this seed and a tag.
  static Rng derive(std::uint64_t seed, std::uint64_t tag);

  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  double normal();                        // N(0, 1)
  std::size_t index(std::size_t n);       // uniform in [0, n)
  std::uint64_t next_u64() { return engine_(); }

  Vector normal_vector(Eigen::Index n);
  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols);
  Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi);

  std::string save() const;
  void load(const std::string& state);

 private:
  std::mt19937_64 engine_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace diffsr
