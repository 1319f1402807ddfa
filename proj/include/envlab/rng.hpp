#pragma once

#include <cstdint>
#include <random>

namespace envlab {

/// Seeded generator used by every sampler and simulation.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Uniform variates and coins are derived from raw engine words
/// here rather than through std:: distributions, whose algorithms vary
/// between standard libraries. A given seed therefore reproduces the same
/// plays on every platform and release.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on (0, 1].
  double uniform_open_closed() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }
  /// Uniform on [0, 1).
  double uniform_closed_open() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
  /// Uniform on (0, 1), never hitting either end.
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }
  /// Fair coin: 0 or 1.
  int coin() { return static_cast<int>(next_u64() >> 63); }

 private:
  std::mt19937_64 engine_;
};

/// Seed for shard `index` of a run seeded with `seed` (splitmix64 finaliser).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace envlab
