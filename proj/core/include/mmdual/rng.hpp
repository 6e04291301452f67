#pragma once

#include <cstdint>
#include <random>

namespace mmdual {

/// Seeded generator with a platform-independent mapping to doubles.
///
/// std::uniform_real_distribution is implementation-defined, so generated
/// scenarios and graphs would differ between standard libraries. Only the
/// raw mt19937_64 stream (which is fully specified) is used here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Requires n > 0.
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive independent per-item seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix_seed(mix_seed(mix_seed(seed) ^ a) ^ b);
}

}  // namespace mmdual
