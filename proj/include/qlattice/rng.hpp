#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace qlattice {

/// SplitMix64 finalizer; decorrelates consecutive inputs.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed of the stream owned by one particle of an ensemble.
constexpr std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

/// Random stream of a single particle. Streams are keyed by (master seed,
/// particle index), so an ensemble gives the same result whatever the order
/// or sharding in which its particles are simulated.
class ParticleStream {
 public:
  using result_type = std::uint64_t;

  ParticleStream(std::uint64_t master_seed, std::uint64_t index)
      : engine_(stream_seed(master_seed, index)) {}
  explicit ParticleStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform double in [0, 1) from the top 53 bits of one draw.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qlattice
