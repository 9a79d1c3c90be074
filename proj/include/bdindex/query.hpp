#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bdindex/graph.hpp"
#include "bdindex/index.hpp"
#include "bdindex/types.hpp"

namespace bdindex {

// Dense scratch holding the degree-normalized expected-visit distribution of
// the root-absorbed walk from a source vertex. Entries are addressed by DFS
// position (entry p belongs to vertex tree.order[p]); `touched` records the
// written intervals so reset cost stays proportional to work done.
struct TauVector {
  std::vector<double> by_pos;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> touched;  // [begin,end)

  // Sizes to n and zeroes only previously touched intervals.
  void reset(std::size_t n) {
    if (by_pos.size() != n) {
      by_pos.assign(n, 0.0);
    } else {
      for (auto [b, e] : touched)
        std::fill(by_pos.begin() + b, by_pos.begin() + e, 0.0);
    }
    touched.clear();
  }
};

struct QueryResult {
  vertex_t s = 0;
  vertex_t t = 0;
  double bd = 0.0;
  std::chrono::nanoseconds elapsed{0};
};

// out += sum over non-root ancestors u of s of (m_u[s]/f_u) * m_u, each term
// scattered over u's DFS interval. `out` must be freshly reset. The result
// equals the column of the root-grounded Laplacian inverse at s; it is zero
// when s is the root.
void accumulate_tau(const BDIndex& idx, vertex_t s, TauVector& out);

// Value of the distribution at a vertex id (scratch is DFS-position indexed).
inline double tau_entry(const BDIndex& idx, const TauVector& tau, vertex_t v) {
  return tau.by_pos[idx.tree().dfs_pos[v]];
}

// b(s,t) = |tau_s - tau_t|^2 - (1/n)(sum of entries)^2, clamping negative
// roundoff within 1e-9 * |tau_s - tau_t|^2 to zero. Symmetric bit-for-bit.
QueryResult query_bd(const BDIndex& idx, vertex_t s, vertex_t t);
QueryResult query_bd(const BDIndex& idx, vertex_t s, vertex_t t, TauVector& tau_s,
                     TauVector& tau_t);

// Results in input order; each worker thread owns one scratch pair, so
// values are identical for any worker count. Invalid ids abort up front with
// the offending position.
std::vector<QueryResult> batch_query(const BDIndex& idx,
                                     std::span<const std::pair<vertex_t, vertex_t>> pairs,
                                     unsigned workers = 1);

struct EdgeScore {
  vertex_t u = 0;  // min endpoint
  vertex_t v = 0;  // max endpoint
  double bd = 0.0;
};

// BD of every edge, sorted descending (ties: ascending (u,v)), truncated to
// the top_k highest-scoring edges.
std::vector<EdgeScore> edge_centrality(const BDIndex& idx, const Graph& g,
                                       std::size_t top_k);

}  // namespace bdindex
