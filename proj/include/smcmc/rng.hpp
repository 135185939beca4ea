#pragma once

#include <cstdint>
#include <random>

namespace smcmc {

/// Seedable random generator with named independent streams. Every piece of
/// randomness in the library flows through one of these; a (seed, stream_id)
/// pair fully determines the draw sequence, which is what makes chains and
/// simulations bit-reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed, 0)) {}

  /// Independent stream derived from (seed, stream_id) by splitmix64-style
  /// scrambling; distinct ids give statistically independent sequences.
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    return Rng(seed, stream_id);
  }

  double uniform() { return uniform_(engine_); }
  double normal() { return normal_(engine_); }
  std::uint64_t bits() { return engine_(); }

 private:
  Rng(std::uint64_t seed, std::uint64_t stream_id) : engine_(mix(seed, stream_id)) {}

  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream_id + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace smcmc
