#pragma once

#include <cstdint>
#include <random>

#include "metallab/numlin.hpp"

namespace metallab {

/// Deterministic sampler. Maps raw mt19937_64 output directly, so sequences
/// do not depend on the standard library's distribution implementations.
class SampleRng {
public:
  explicit SampleRng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream derived from (seed, tag) via splitmix64.
  static SampleRng stream(std::uint64_t seed, std::uint64_t tag);

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box-Muller, one value per call).
  double normal();

  Vec uniform_vector(std::size_t n, double lo = -1.0, double hi = 1.0);
  Vec normal_vector(std::size_t n);

private:
  std::mt19937_64 engine_;
};

}  // namespace metallab
