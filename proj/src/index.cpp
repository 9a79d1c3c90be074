#include "bdindex/index.hpp"

#include <algorithm>

#include "bdindex/dense.hpp"

namespace bdindex {

std::optional<vertex_t> BDIndex::find_label(const std::string& label) const {
  auto it = label_lookup_.find(label);
  if (it == label_lookup_.end()) return std::nullopt;
  return it->second;
}

void BDIndex::rebuild_lookup() {
  label_lookup_.clear();
  label_lookup_.reserve(id_map_.size());
  for (vertex_t v = 0; v < id_map_.size(); ++v) label_lookup_.emplace(id_map_[v], v);
}

BDIndex build_index(const Graph& g, HierarchyTree tree) {
  if (auto bad = validate_hierarchy(g, tree))
    throw Error(ErrorKind::invalid_hierarchy, "hierarchy rejected: " + *bad);
  const vertex_t n = g.num_vertices();

  BDIndex idx;
  idx.tree_ = std::move(tree);
  const HierarchyTree& t = idx.tree_;

  idx.offset_.assign(n, 0);
  std::uint64_t total = 0;
  for (vertex_t i = 0; i < n; ++i) {
    vertex_t v = t.order[i];
    idx.offset_[v] = total;
    total += t.dfs_size[v];
  }
  idx.values_.assign(total, 0.0);
  idx.f_.assign(n, 0.0);

  // sigma[u] = sum over neighbors x of v inside Desc(u) of w(v,x) * m_u[x],
  // collected by climbing each such x up to v. Stamps avoid clearing.
  std::vector<double> sigma(n, 0.0);
  std::vector<std::uint32_t> stamp(n, 0);
  std::uint32_t gen = 0;
  std::vector<vertex_t> touched;

  for (std::uint32_t i = n; i-- > 0;) {
    const vertex_t v = t.order[i];
    double* mv = idx.values_.data() + idx.offset_[v];
    ++gen;
    touched.clear();

    for (const auto& e : g.neighbors(v)) {
      if (!t.is_ancestor(v, e.id)) continue;
      for (vertex_t u = e.id; u != v; u = t.parent[u]) {
        const double m_ux =
            idx.values_[idx.offset_[u] + (t.dfs_pos[e.id] - t.dfs_start[u])];
        if (stamp[u] != gen) {
          stamp[u] = gen;
          sigma[u] = 0.0;
          touched.push_back(u);
        }
        sigma[u] += e.weight * m_ux;
      }
    }

    // Descendants contribute in DFS order (fixed summation order).
    std::sort(touched.begin(), touched.end(),
              [&](vertex_t a, vertex_t b) { return t.dfs_pos[a] < t.dfs_pos[b]; });
    for (vertex_t u : touched) {
      const double coef = sigma[u] / idx.f_[u];
      const double* mu = idx.values_.data() + idx.offset_[u];
      double* dst = mv + (t.dfs_start[u] - t.dfs_start[v]);
      const std::uint32_t len = t.dfs_size[u];
      for (std::uint32_t k = 0; k < len; ++k) dst[k] += coef * mu[k];
    }
    mv[0] = 1.0;

    double fv = g.degree(v);
    for (const auto& e : g.neighbors(v))
      if (t.is_ancestor(v, e.id))
        fv -= e.weight * mv[t.dfs_pos[e.id] - t.dfs_start[v]];
    if (v != t.root && fv <= 1e-12 * g.degree(v))
      throw Error(ErrorKind::numerical_breakdown,
                  "pivot f collapsed at vertex '" + g.label(v) +
                      "' (got " + std::to_string(fv) +
                      "); the hierarchy is unusable for this graph");
    idx.f_[v] = fv;
  }

  idx.degrees_ = g.degrees();
  idx.id_map_ = g.labels();
  idx.rebuild_lookup();
  return idx;
}

NodeLabel direct_label_oracle(const Graph& g, const HierarchyTree& t, vertex_t v) {
  if (v >= t.num_vertices())
    throw Error(ErrorKind::out_of_range, "vertex id out of range");
  const std::uint32_t size = t.dfs_size[v];
  if (size > 4096 + 1)
    throw Error(ErrorKind::size_guard,
                "direct_label_oracle is a debug oracle capped at |Desc| <= 4096");

  std::span<const vertex_t> sub(t.order.data() + t.dfs_start[v] + 1, size - 1);
  DenseMatrix l_s = laplacian_submatrix(g, sub);

  std::vector<double> a(size - 1, 0.0);
  for (const auto& e : g.neighbors(v))
    if (t.is_ancestor(v, e.id))
      a[t.dfs_pos[e.id] - t.dfs_start[v] - 1] = e.weight;

  std::vector<double> m(a);
  if (!sub.empty()) {
    try {
      cholesky_factor(l_s);
    } catch (const Error&) {
      throw Error(ErrorKind::singular_matrix,
                  "descendant Laplacian block is singular at vertex '" + g.label(v) +
                      "' (separator property violated?)");
    }
    cholesky_solve(l_s, m);
  }

  NodeLabel label;
  label.m.resize(size);
  label.m[0] = 1.0;
  std::copy(m.begin(), m.end(), label.m.begin() + 1);
  label.f = g.degree(v);
  for (std::uint32_t i = 0; i + 1 < size; ++i) label.f -= a[i] * m[i];
  return label;
}

void verify_index_matches(const BDIndex& idx, const Graph& g) {
  if (idx.num_vertices() != g.num_vertices())
    throw Error(ErrorKind::mismatch,
                "index holds " + std::to_string(idx.num_vertices()) +
                    " vertices but the graph has " +
                    std::to_string(g.num_vertices()));
  for (vertex_t v = 0; v < g.num_vertices(); ++v)
    if (idx.id_map()[v] != g.label(v))
      throw Error(ErrorKind::mismatch,
                  "index and graph disagree at internal vertex " + std::to_string(v) +
                      ": index label '" + idx.id_map()[v] + "' vs graph label '" +
                      g.label(v) + "'");
}

}  // namespace bdindex
