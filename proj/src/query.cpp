#include "bdindex/query.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace bdindex {

namespace {

void check_vertex(const BDIndex& idx, vertex_t v) {
  if (v >= idx.num_vertices())
    throw Error(ErrorKind::out_of_range,
                "vertex id " + std::to_string(v) + " out of range for n=" +
                    std::to_string(idx.num_vertices()));
}

}  // namespace

void accumulate_tau(const BDIndex& idx, vertex_t s, TauVector& out) {
  check_vertex(idx, s);
  const HierarchyTree& t = idx.tree();
  vertex_t top = kNoVertex;
  for (vertex_t u = s; u != t.root; u = t.parent[u]) {
    const std::span<const double> mu = idx.label_vector(u);
    const double coef = mu[t.dfs_pos[s] - t.dfs_start[u]] / idx.label_f(u);
    double* dst = out.by_pos.data() + t.dfs_start[u];
    for (std::uint32_t k = 0; k < mu.size(); ++k) dst[k] += coef * mu[k];
    top = u;
  }
  if (top != kNoVertex)
    out.touched.emplace_back(t.dfs_start[top], t.dfs_start[top] + t.dfs_size[top]);
}

QueryResult query_bd(const BDIndex& idx, vertex_t s, vertex_t t, TauVector& tau_s,
                     TauVector& tau_t) {
  check_vertex(idx, s);
  check_vertex(idx, t);
  const std::size_t n = idx.num_vertices();
  tau_s.reset(n);
  tau_t.reset(n);

  const auto start = std::chrono::steady_clock::now();
  accumulate_tau(idx, s, tau_s);
  accumulate_tau(idx, t, tau_t);

  // Union of the touched intervals (at most one per side, possibly nested).
  std::pair<std::uint32_t, std::uint32_t> spans[2];
  std::size_t m = 0;
  for (const auto& iv : tau_s.touched) spans[m++] = iv;
  for (const auto& iv : tau_t.touched) spans[m++] = iv;
  if (m == 2 && spans[1] < spans[0]) std::swap(spans[0], spans[1]);

  double sum2 = 0.0, sum1 = 0.0;
  std::uint32_t done = 0;  // exclusive end of the region already summed
  for (std::size_t i = 0; i < m; ++i) {
    std::uint32_t b = std::max(spans[i].first, done);
    std::uint32_t e = std::max(spans[i].second, done);
    for (std::uint32_t p = b; p < e; ++p) {
      const double d = tau_s.by_pos[p] - tau_t.by_pos[p];
      sum2 += d * d;
      sum1 += d;
    }
    done = e;
  }

  double bd = sum2 - (sum1 * sum1) / static_cast<double>(n);
  if (bd < 0.0) {
    if (bd >= -1e-9 * sum2)
      bd = 0.0;
    else
      throw Error(ErrorKind::negative_result,
                  "distance came out " + std::to_string(bd) +
                      ", beyond roundoff tolerance (corrupt index?)");
  }
  const auto stop = std::chrono::steady_clock::now();

  QueryResult r;
  r.s = s;
  r.t = t;
  r.bd = bd;
  r.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start);
  return r;
}

QueryResult query_bd(const BDIndex& idx, vertex_t s, vertex_t t) {
  TauVector a, b;
  return query_bd(idx, s, t, a, b);
}

std::vector<QueryResult> batch_query(const BDIndex& idx,
                                     std::span<const std::pair<vertex_t, vertex_t>> pairs,
                                     unsigned workers) {
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (pairs[i].first >= idx.num_vertices() || pairs[i].second >= idx.num_vertices())
      throw Error(ErrorKind::out_of_range,
                  "invalid pair at position " + std::to_string(i) + ": (" +
                      std::to_string(pairs[i].first) + ", " +
                      std::to_string(pairs[i].second) + ")");

  std::vector<QueryResult> results(pairs.size());
  if (pairs.empty()) return results;
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(pairs.size())));

  if (workers == 1) {
    TauVector a, b;
    for (std::size_t i = 0; i < pairs.size(); ++i)
      results[i] = query_bd(idx, pairs[i].first, pairs[i].second, a, b);
    return results;
  }

  std::atomic<std::size_t> next{0};
  auto run = [&] {
    TauVector a, b;
    while (true) {
      std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= pairs.size()) return;
      results[i] = query_bd(idx, pairs[i].first, pairs[i].second, a, b);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  return results;
}

std::vector<EdgeScore> edge_centrality(const BDIndex& idx, const Graph& g,
                                       std::size_t top_k) {
  verify_index_matches(idx, g);
  std::vector<EdgeScore> scores;
  scores.reserve(g.num_edges());
  TauVector a, b;
  for (vertex_t u = 0; u < g.num_vertices(); ++u)
    for (const auto& e : g.neighbors(u)) {
      if (e.id < u) continue;
      scores.push_back({u, e.id, query_bd(idx, u, e.id, a, b).bd});
    }
  std::sort(scores.begin(), scores.end(), [](const EdgeScore& x, const EdgeScore& y) {
    if (x.bd != y.bd) return x.bd > y.bd;
    if (x.u != y.u) return x.u < y.u;
    return x.v < y.v;
  });
  if (scores.size() > top_k) scores.resize(top_k);
  return scores;
}

}  // namespace bdindex
