#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bdindex/graph.hpp"
#include "bdindex/types.hpp"

namespace bdindex {

// Rooted tree over all vertices plus the DFS preorder layout that label
// vectors are indexed by. Desc(v) occupies the contiguous dfs_pos range
// [dfs_start(v), dfs_start(v) + dfs_size(v)); dfs_pos(v) == dfs_start(v).
struct HierarchyTree {
  vertex_t root = kNoVertex;
  std::vector<vertex_t> parent;  // parent[root] == root
  std::vector<std::vector<vertex_t>> children;  // sorted ascending
  std::vector<std::uint32_t> dfs_pos;
  std::vector<std::uint32_t> dfs_start;
  std::vector<std::uint32_t> dfs_size;
  std::vector<vertex_t> order;  // DFS preorder; order[dfs_start[v]] == v

  vertex_t num_vertices() const { return static_cast<vertex_t>(parent.size()); }

  // v in Desc(anc), inclusive of anc == v.
  bool is_ancestor(vertex_t anc, vertex_t v) const {
    return dfs_pos[v] >= dfs_start[anc] && dfs_pos[v] < dfs_start[anc] + dfs_size[anc];
  }
};

struct HierarchyStats {
  std::uint32_t h = 0;          // node count of the longest root-to-leaf path
  double s_avg = 0.0;           // s_total / n
  std::uint64_t s_total = 0;    // sum over v of |Desc(v)|
};

// Read-only view of the subgraph induced by a vertex subset. Used by the
// divide step so separator providers never see copied adjacency.
class SubgraphView {
 public:
  // Non-owning membership: v is in the view iff stamps[v] == stamp.
  SubgraphView(const Graph& g, std::span<const vertex_t> vertices,
               const std::uint32_t* stamps, std::uint32_t stamp)
      : g_(&g), verts_(vertices), stamps_(stamps), stamp_(stamp) {}

  // Owning convenience for tests: builds its own membership mask.
  SubgraphView(const Graph& g, std::vector<vertex_t> vertices);

  const Graph& graph() const { return *g_; }
  std::span<const vertex_t> vertices() const { return verts_; }  // ascending
  std::size_t size() const { return verts_.size(); }
  bool contains(vertex_t v) const { return stamps_[v] == stamp_; }

 private:
  const Graph* g_;
  std::vector<vertex_t> owned_verts_;
  std::span<const vertex_t> verts_;
  std::vector<std::uint32_t> owned_stamps_;
  const std::uint32_t* stamps_ = nullptr;
  std::uint32_t stamp_ = 1;
};

// Pluggable separator heuristic for the divide-and-conquer builder.
class SeparatorProvider {
 public:
  virtual ~SeparatorProvider() = default;
  // Called on a connected subgraph with >= 2 vertices; must return a
  // nonempty proper subset of its vertices.
  virtual std::vector<vertex_t> find_separator(const SubgraphView& sub) = 0;
};

// Default provider: BFS levelization from a pseudo-peripheral vertex. Picks
// the smallest level whose removal splits the remainder into >= 2 parts of
// size <= ceil(2/3 |V_sub|) each (ties: lowest level), then shrinks the level
// to the endpoints of cut edges into the smaller side. Falls back to the
// minimum-degree vertex (ties: lowest id) when no level qualifies.
std::vector<vertex_t> bfs_bisection_separator(const SubgraphView& sub);

class BfsBisectionSeparator final : public SeparatorProvider {
 public:
  std::vector<vertex_t> find_separator(const SubgraphView& sub) override {
    return bfs_bisection_separator(sub);
  }
};

// Divide-and-conquer builder: the separator becomes a downward chain
// (ascending id, topmost first), each residual connected component recurses
// under the chain's bottom node, singletons become leaves.
HierarchyTree build_separator_hierarchy(const Graph& g, SeparatorProvider& sep);
HierarchyTree build_separator_hierarchy(const Graph& g);  // default provider

// Minimum-degree elimination (ties: smallest degree, then smallest id; fill
// edges added among the eliminated vertex's current neighbors), realized as
// the elimination tree of the filled graph: parent(v) = earliest-eliminated
// fill neighbor of v among those eliminated after v; last vertex is the root.
HierarchyTree build_min_degree_hierarchy(const Graph& g);

// Structural invariants only (root/parent links, DFS permutation, interval
// nesting, size bookkeeping); needs no graph. nullopt when they all hold.
std::optional<std::string> validate_tree_structure(const HierarchyTree& t);

// nullopt when every structural invariant and the separator property hold;
// otherwise a description naming the offending vertex or edge.
std::optional<std::string> validate_hierarchy(const Graph& g, const HierarchyTree& t);

HierarchyStats hierarchy_stats(const HierarchyTree& t);

// Text dump, one line per vertex: "<vertex> <parent> <dfs_start> <dfs_size>",
// root first (DFS preorder).
void dump_tree(const HierarchyTree& t, std::ostream& out);

}  // namespace bdindex
