#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace enkfsq {

/// Purpose tags for substream derivation. Each consumer of randomness in a
/// twin experiment owns one tag, so runs that differ only in the analysis
/// scheme see identical truth noise, forcing and initial ensembles.
enum class StreamTag : std::uint64_t {
  ObsNoise = 1,
  MemberForcing = 2,
  Analysis = 3,
  InitialEnsemble = 4,
  Background = 5,
  Test = 99,
};

/// Mixes a root seed with a path of integers into a new 64-bit seed
/// (splitmix64 finalizer chained over the path).
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path);

/// SplitMix64 as a UniformRandomBitGenerator. Eight bytes of state, so a
/// fresh substream per (cycle, member, observation) costs nothing to create.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Seeded random stream. Owns its engine and distribution state; not shared
/// across threads.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static RandomStream derive(std::uint64_t root, StreamTag tag,
                             std::initializer_list<std::uint64_t> path = {});

  double normal() { return normal_(engine_); }
  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }

  SplitMix64& engine() { return engine_; }

 private:
  SplitMix64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace enkfsq
