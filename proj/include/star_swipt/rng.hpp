#pragma once

#include <cstdint>
#include <random>

#include "star_swipt/types.hpp"

namespace star_swipt {

// Seedable generator whose output sequence does not depend on the standard
// library: the engine is the fully specified mt19937_64 and the uniform and
// Gaussian transforms are implemented here rather than taken from <random>'s
// distributions (whose algorithms are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller (the spare value is cached).
  double normal();
  /// Circularly-symmetric complex Gaussian with E|z|^2 = 1.
  cplx complex_normal();

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Mixes a base seed with a stream index (splitmix64 finalizer) so that
/// derived streams are decorrelated.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace star_swipt
