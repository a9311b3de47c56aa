#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace semibvm {

/// SplitMix64 finalizer; used to derive well-separated stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for stream `index` of a family rooted at `base`. Stream k depends only
/// on (base, k), never on how work is scheduled.
std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index);

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  Eigen::VectorXd normal_vector(Eigen::Index n);

  /// Independent child stream; advances this generator by one draw.
  Rng split() { return Rng(engine_()); }

  std::mt19937_64 &engine() { return engine_; }

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace semibvm
