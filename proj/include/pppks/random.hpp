#pragma once

#include <cstdint>
#include <random>

namespace pppks {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based child seed: a pure function of (parent, key), so work units
/// keyed by index draw the same randomness in any execution order.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t key) noexcept {
  return splitmix64(splitmix64(parent) ^ splitmix64(key + 0x632be59bd9b4e019ULL));
}

/// An exclusively owned pseudo-random stream. Uniform and normal variates are
/// produced by fixed conversions so that streams are reproducible across
/// standard-library implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal();

  /// Independent stream for sub-task `key`; does not advance this stream.
  RandomStream child(std::uint64_t key) const { return RandomStream(derive_seed(seed_, key)); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pppks
