#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "bdindex/types.hpp"

namespace bdindex {

// Unbiased integer in [0, bound) by rejection. mt19937_64's output sequence
// is fixed by the standard, so results are reproducible across platforms
// (std::uniform_int_distribution is not).
inline std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

// k uniform distinct unordered pairs (s != t) over vertices 0..n-1, seeded.
// Throws Error(out_of_range) when k exceeds n*(n-1)/2.
std::vector<std::pair<vertex_t, vertex_t>> sample_distinct_pairs(vertex_t n,
                                                                 std::uint64_t k,
                                                                 std::uint64_t seed);

}  // namespace bdindex
