#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace paymine {

// Deterministic RNG helpers. mt19937_64 output is fixed by the standard, and
// these helpers avoid std::uniform_int_distribution / std::shuffle, whose
// results vary across standard library implementations. Every randomized
// stage derives its draws from these, so a seed pins the output everywhere.

// Unbiased draw in [0, bound) via rejection sampling.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
  const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

// Draw in [lo, hi] inclusive.
inline std::uint64_t uniform_range(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  if (lo > hi) throw std::invalid_argument("uniform_range: lo > hi");
  return lo + uniform_below(rng, hi - lo + 1);
}

// Fisher-Yates shuffle over 0..n-1.
inline std::vector<std::size_t> shuffled_indices(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

}  // namespace paymine
