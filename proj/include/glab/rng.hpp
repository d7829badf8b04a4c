#pragma once

#include <cstdint>
#include <string_view>

namespace glab {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). A bijection on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-mode key derivation. For a fixed `key`, the map counter -> result
/// is a bijection, so distinct counters under one key never collide.
constexpr std::uint64_t mix64(std::uint64_t key, std::uint64_t counter) noexcept {
  return splitmix64(key ^ splitmix64(counter));
}

constexpr std::uint64_t mix64(std::uint64_t key, std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(mix64(key, a), b);
}

// Lattice vertices are packed into one counter word; coordinates are < 2^32.
constexpr std::uint64_t vertex_counter(std::uint64_t x, std::uint64_t y) noexcept {
  return (x << 32) | (y & 0xffffffffULL);
}

/// Top 53 bits as a double in [0, 1).
constexpr double to_unit(std::uint64_t h) noexcept {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Bernoulli(s) weight of vertex (x, y) in the field keyed by `seed`.
/// This is the single definition of the weight stream; everything that
/// regenerates or resamples weights goes through it.
constexpr std::uint8_t vertex_bernoulli(std::uint64_t seed, std::uint64_t x, std::uint64_t y,
                                        double s) noexcept {
  return to_unit(mix64(seed, vertex_counter(x, y))) < s ? 1 : 0;
}

/// Stable 64-bit tag for a string (FNV-1a then finalized).
constexpr std::uint64_t string_tag(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return splitmix64(h);
}

/// Seed of replication `index` under a base seed.
constexpr std::uint64_t replication_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return mix64(base, index);
}

/// Small sequential generator for auxiliary draws (bootstrap resampling,
/// random test instances). Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept { return mix64(key_, counter_++); }

  double uniform() noexcept { return to_unit((*this)()); }

  // Unbiased integer in [lo, hi] by rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>((*this)());
    const std::uint64_t limit = max() - max() % span;
    std::uint64_t r;
    do {
      r = (*this)();
    } while (r >= limit);
    return lo + static_cast<std::int64_t>(r % span);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace glab
