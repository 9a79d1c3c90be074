#include "bdindex/sampling.hpp"

#include <algorithm>
#include <unordered_set>

namespace bdindex {

std::vector<std::pair<vertex_t, vertex_t>> sample_distinct_pairs(vertex_t n,
                                                                 std::uint64_t k,
                                                                 std::uint64_t seed) {
  const std::uint64_t total =
      static_cast<std::uint64_t>(n) * (n > 0 ? n - 1 : 0) / 2;
  if (k > total)
    throw Error(ErrorKind::out_of_range,
                "requested " + std::to_string(k) + " distinct pairs but only " +
                    std::to_string(total) + " exist");
  std::mt19937_64 rng(seed);
  std::vector<std::pair<vertex_t, vertex_t>> out;
  out.reserve(k);

  if (k * 3 >= total) {
    // Dense request: enumerate and partially shuffle.
    std::vector<std::pair<vertex_t, vertex_t>> all;
    all.reserve(total);
    for (vertex_t u = 0; u < n; ++u)
      for (vertex_t v = u + 1; v < n; ++v) all.emplace_back(u, v);
    for (std::uint64_t i = 0; i < k; ++i) {
      std::uint64_t j = i + bounded_rand(rng, all.size() - i);
      std::swap(all[i], all[j]);
      out.push_back(all[i]);
    }
    return out;
  }

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(k * 2);
  while (out.size() < k) {
    auto s = static_cast<vertex_t>(bounded_rand(rng, n));
    auto t = static_cast<vertex_t>(bounded_rand(rng, n));
    if (s == t) continue;
    std::uint64_t key = (static_cast<std::uint64_t>(std::min(s, t)) << 32) |
                        std::max(s, t);
    if (seen.insert(key).second) out.emplace_back(s, t);
  }
  return out;
}

}  // namespace bdindex
