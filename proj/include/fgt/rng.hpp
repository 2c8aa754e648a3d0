#pragma once

#include <cstdint>

namespace fgt {

/// Counter-based SplitMix64.
///
/// Draw i of a stream keyed by `key` is `mix(key + (i + 1) * kGamma)`, so any
/// draw can be computed without touching the ones before it. Streams for
/// items, replicates or blocks are keyed with `derive(seed, index)`. The
/// constants are those of Steele, Lea and Flood's SplitMix64 and must not
/// change: simulated logs and bootstrap results are reproducible across
/// implementations only through them.
struct SplitMix64 {
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Key of substream `index` under `seed`.
  static constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix(seed ^ mix(index + kGamma));
  }

  explicit constexpr SplitMix64(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t at(std::uint64_t i) const noexcept { return mix(key_ + (i + 1) * kGamma); }

  constexpr std::uint64_t next() noexcept { return at(counter_++); }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n) by 128-bit multiply-high.
  std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  constexpr std::uint64_t position() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace fgt
