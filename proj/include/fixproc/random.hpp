#pragma once

// Seeded random streams. Every stochastic routine takes an explicit Rng; a
// single user seed fans out into independent named sub-streams so results do
// not depend on evaluation order.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace fixproc {

std::uint64_t splitmix64(std::uint64_t x);

/// Stable 64-bit FNV-1a hash, used for stream names and config hashes.
std::uint64_t fnv1a64(std::string_view s);

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Sub-stream keyed by (seed, name, index).
  static Rng stream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0);

  /// Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform();

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t next_u64() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

/// Fisher-Yates shuffle with the portable integer sampler.
template <class T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace fixproc
