#ifndef PATHFORGE_RNG_HPP
#define PATHFORGE_RNG_HPP

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace pathforge {

// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Child seed for run `index` of a batch keyed by `seed`. For a fixed seed the
/// map index -> child is injective, so child seeds never collide.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(mix64(seed) + index);
}

/// Counter-based random stream keyed by (seed, purpose tag).
///
/// Output depends only on the key and the draw count, never on the standard
/// library's distribution implementations, so sequences are identical on every
/// platform and compiler.
class Rng {
 public:
  Rng(std::uint64_t seed, std::string_view tag) noexcept
      : key_(mix64(seed ^ mix64(fnv1a(tag)))) {}

  std::uint64_t next_u64() noexcept { return mix64(key_ + 0x632be59bd9b4e019ULL * ++counter_); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n); n must be positive. Rejection keeps it unbiased.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
    std::uint64_t r = next_u64();
    while (r >= limit) r = next_u64();
    return r % n;
  }

  bool coin() noexcept { return (next_u64() >> 63) != 0; }

  template <typename T>
  void shuffle(std::vector<T>& v) noexcept {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::uint64_t draws() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace pathforge

#endif  // PATHFORGE_RNG_HPP
