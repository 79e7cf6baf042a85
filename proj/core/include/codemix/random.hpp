#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>

namespace codemix {

// SplitMix64 (Steele, Lea, Flood 2014). Every stochastic step in the
// pipeline (sampling, shuffling, dropout, init) draws from this generator so
// that a seed reproduces the same stream on any platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, bound). Rejection sampling removes modulo bias:
  // draws below (2^64 - bound) mod bound are discarded.
  std::uint64_t below(std::uint64_t bound) noexcept;

  // Uniform double in [0, 1) from the top 53 bits.
  double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (one value per call, the sine half is
  // discarded so the stream position stays simple to reason about).
  double normal() noexcept;

 private:
  std::uint64_t state_;
};

// Fisher-Yates, descending: for i = n-1 .. 1 swap(i, below(i+1)).
template <typename T>
void shuffle(std::span<T> items, SplitMix64& rng) noexcept {
  if (items.size() < 2) return;
  for (std::size_t i = items.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    using std::swap;
    swap(items[i], items[j]);
  }
}

// Derives an independent stream seed from a base seed and a list of tags
// (stream id, epoch, step, ...).
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> tags) noexcept;

}  // namespace codemix
