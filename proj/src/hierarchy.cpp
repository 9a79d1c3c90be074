#include "bdindex/hierarchy.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <ostream>
#include <set>
#include <utility>

namespace bdindex {

namespace {

constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();

std::uint32_t local_of(std::span<const vertex_t> verts, vertex_t v) {
  return static_cast<std::uint32_t>(
      std::lower_bound(verts.begin(), verts.end(), v) - verts.begin());
}

// BFS distances from src, local-indexed by position in sub.vertices().
std::vector<std::uint32_t> bfs_levels(const SubgraphView& sub, vertex_t src) {
  auto verts = sub.vertices();
  std::vector<std::uint32_t> dist(verts.size(), kUnset);
  std::vector<vertex_t> queue{src};
  dist[local_of(verts, src)] = 0;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    vertex_t v = queue[i];
    std::uint32_t dv = dist[local_of(verts, v)];
    for (const auto& e : sub.graph().neighbors(v)) {
      if (!sub.contains(e.id)) continue;
      std::uint32_t& de = dist[local_of(verts, e.id)];
      if (de == kUnset) {
        de = dv + 1;
        queue.push_back(e.id);
      }
    }
  }
  return dist;
}

// Farthest vertex from src (ties: smallest id).
vertex_t bfs_endpoint(const SubgraphView& sub, vertex_t src) {
  auto verts = sub.vertices();
  auto dist = bfs_levels(sub, src);
  std::uint32_t best = 0;
  vertex_t who = src;
  for (std::size_t i = 0; i < verts.size(); ++i)
    if (dist[i] != kUnset && dist[i] > best) {
      best = dist[i];
      who = verts[i];
    }
  return who;
}

// Minimum structural degree within the subgraph; ties by smallest id.
vertex_t min_degree_vertex(const SubgraphView& sub) {
  vertex_t best = kNoVertex;
  std::size_t best_deg = std::numeric_limits<std::size_t>::max();
  for (vertex_t v : sub.vertices()) {
    std::size_t d = 0;
    for (const auto& e : sub.graph().neighbors(v))
      if (sub.contains(e.id)) ++d;
    if (d < best_deg) {
      best_deg = d;
      best = v;
    }
  }
  return best;
}

}  // namespace

SubgraphView::SubgraphView(const Graph& g, std::vector<vertex_t> vertices)
    : g_(&g), owned_verts_(std::move(vertices)) {
  std::sort(owned_verts_.begin(), owned_verts_.end());
  owned_verts_.erase(std::unique(owned_verts_.begin(), owned_verts_.end()),
                     owned_verts_.end());
  verts_ = owned_verts_;
  owned_stamps_.assign(g.num_vertices(), 0);
  for (vertex_t v : owned_verts_) owned_stamps_[v] = 1;
  stamps_ = owned_stamps_.data();
  stamp_ = 1;
}

std::vector<vertex_t> bfs_bisection_separator(const SubgraphView& sub) {
  auto verts = sub.vertices();
  const std::size_t k = verts.size();
  if (k <= 1) return {verts.begin(), verts.end()};

  // Pseudo-peripheral source: endpoint of two BFS sweeps.
  vertex_t e1 = bfs_endpoint(sub, verts[0]);
  vertex_t e2 = bfs_endpoint(sub, e1);
  auto dist = bfs_levels(sub, e2);

  std::uint32_t max_level = 0;
  for (std::uint32_t d : dist) max_level = std::max(max_level, d);
  const std::size_t bound = (2 * k + 2) / 3;  // ceil(2k/3)

  // A level is eligible when deleting it splits the rest into >= 2 connected
  // parts, each of size <= bound. Pick the smallest such level by
  // cardinality; break ties toward the lowest level index.
  std::vector<std::size_t> level_size(max_level + 1, 0);
  for (std::uint32_t d : dist) ++level_size[d];

  std::uint32_t chosen = kUnset;
  std::size_t chosen_size = 0;
  std::vector<std::uint32_t> comp(k);
  for (std::uint32_t lv = 0; lv <= max_level; ++lv) {
    if (level_size[lv] == k) continue;  // deleting everything is not a cut
    std::fill(comp.begin(), comp.end(), 0);
    std::uint32_t parts = 0;
    std::size_t largest = 0;
    std::vector<vertex_t> queue;
    for (std::size_t i = 0; i < k; ++i) {
      if (dist[i] == lv || comp[i] != 0) continue;
      ++parts;
      std::size_t sz = 0;
      queue.assign(1, verts[i]);
      comp[i] = parts;
      while (!queue.empty()) {
        vertex_t v = queue.back();
        queue.pop_back();
        ++sz;
        for (const auto& e : sub.graph().neighbors(v)) {
          if (!sub.contains(e.id)) continue;
          std::uint32_t li = local_of(verts, e.id);
          if (dist[li] == lv || comp[li] != 0) continue;
          comp[li] = parts;
          queue.push_back(e.id);
        }
      }
      largest = std::max(largest, sz);
    }
    if (parts >= 2 && largest <= bound) {
      if (chosen == kUnset || level_size[lv] < chosen_size) {
        chosen = lv;
        chosen_size = level_size[lv];
      }
    }
  }

  if (chosen == kUnset) return {min_degree_vertex(sub)};

  std::vector<vertex_t> cut;
  for (std::size_t i = 0; i < k; ++i)
    if (dist[i] == chosen) cut.push_back(verts[i]);

  // Shrink toward the smaller side of the induced edge cut: keep only the
  // cut vertices with a neighbor on that side.
  std::size_t below = 0, above = 0;
  for (std::uint32_t d : dist) {
    if (d < chosen) ++below;
    if (d > chosen) ++above;
  }
  const bool use_below = below <= above;
  const std::size_t smaller = use_below ? below : above;
  if (smaller > 0) {
    std::vector<vertex_t> shrunk;
    for (vertex_t c : cut) {
      bool touches = false;
      for (const auto& e : sub.graph().neighbors(c)) {
        if (!sub.contains(e.id)) continue;
        std::uint32_t d = dist[local_of(verts, e.id)];
        if ((use_below && d < chosen) || (!use_below && d > chosen)) {
          touches = true;
          break;
        }
      }
      if (touches) shrunk.push_back(c);
    }
    if (!shrunk.empty()) cut.swap(shrunk);
  }
  return cut;  // ascending: built by scanning verts in order
}

namespace {

// Fills children/order/dfs_* from parent[] and root. Children are listed
// ascending by id; DFS visits children by ascending minimum descendant id.
void compute_dfs_layout(HierarchyTree& t) {
  const vertex_t n = t.num_vertices();
  t.children.assign(n, {});
  for (vertex_t v = 0; v < n; ++v)
    if (v != t.root) t.children[t.parent[v]].push_back(v);

  std::vector<vertex_t> bfs;
  bfs.reserve(n);
  bfs.push_back(t.root);
  for (std::size_t i = 0; i < bfs.size(); ++i)
    for (vertex_t c : t.children[bfs[i]]) bfs.push_back(c);
  if (bfs.size() != n)
    throw Error(ErrorKind::invalid_hierarchy,
                "parent links do not form a tree spanning all vertices");

  std::vector<std::uint32_t> size(n, 1);
  std::vector<vertex_t> min_desc(n);
  for (vertex_t v = 0; v < n; ++v) min_desc[v] = v;
  for (std::size_t i = n; i-- > 1;) {
    vertex_t v = bfs[i];
    vertex_t p = t.parent[v];
    size[p] += size[v];
    min_desc[p] = std::min(min_desc[p], min_desc[v]);
  }

  t.order.clear();
  t.order.reserve(n);
  std::vector<vertex_t> stack{t.root};
  std::vector<vertex_t> kids;
  while (!stack.empty()) {
    vertex_t v = stack.back();
    stack.pop_back();
    t.order.push_back(v);
    kids = t.children[v];
    std::sort(kids.begin(), kids.end(),
              [&](vertex_t a, vertex_t b) { return min_desc[a] < min_desc[b]; });
    for (std::size_t i = kids.size(); i-- > 0;) stack.push_back(kids[i]);
  }

  t.dfs_start.assign(n, 0);
  for (std::uint32_t i = 0; i < n; ++i) t.dfs_start[t.order[i]] = i;
  t.dfs_pos = t.dfs_start;
  t.dfs_size = size;
}

}  // namespace

HierarchyTree build_separator_hierarchy(const Graph& g, SeparatorProvider& sep) {
  if (!is_connected(g))
    throw Error(ErrorKind::disconnected, "hierarchy requires a connected graph");
  const vertex_t n = g.num_vertices();
  HierarchyTree t;
  t.root = kNoVertex;
  t.parent.assign(n, kNoVertex);

  struct Task {
    std::vector<vertex_t> verts;  // ascending
    vertex_t attach;              // chain attaches below this node (kNoVertex at top)
    std::uint32_t id;             // membership stamp
    std::uint32_t depth;
  };
  std::vector<std::uint32_t> member(n, 0);
  std::vector<std::uint32_t> cut_mark(n, 0);
  std::uint32_t cut_gen = 0;
  std::uint32_t next_id = 1;

  std::vector<Task> stack;
  {
    std::vector<vertex_t> all(n);
    for (vertex_t v = 0; v < n; ++v) all[v] = v;
    for (vertex_t v = 0; v < n; ++v) member[v] = next_id;
    stack.push_back({std::move(all), kNoVertex, next_id++, 1});
  }

  while (!stack.empty()) {
    Task task = std::move(stack.back());
    stack.pop_back();
    if (task.depth > n)
      throw Error(ErrorKind::invalid_hierarchy,
                  "separator recursion exceeded depth n (cycle guard)");

    if (task.verts.size() == 1) {
      vertex_t v = task.verts[0];
      t.parent[v] = task.attach == kNoVertex ? v : task.attach;
      if (task.attach == kNoVertex) t.root = v;
      continue;
    }

    SubgraphView view(g, task.verts, member.data(), task.id);
    std::vector<vertex_t> cut = sep.find_separator(view);
    std::sort(cut.begin(), cut.end());
    cut.erase(std::unique(cut.begin(), cut.end()), cut.end());
    bool valid = !cut.empty() && cut.size() < task.verts.size();
    for (vertex_t c : cut)
      if (c >= n || !view.contains(c)) valid = false;
    if (!valid) cut.assign(1, min_degree_vertex(view));

    // Ascending ids, topmost first.
    vertex_t prev = task.attach;
    for (vertex_t c : cut) {
      t.parent[c] = prev == kNoVertex ? c : prev;
      if (prev == kNoVertex) t.root = c;
      prev = c;
    }

    ++cut_gen;
    for (vertex_t c : cut) cut_mark[c] = cut_gen;
    for (vertex_t v : task.verts) {
      if (cut_mark[v] == cut_gen || member[v] != task.id) continue;
      std::uint32_t comp_id = next_id++;
      std::vector<vertex_t> comp{v};
      member[v] = comp_id;
      for (std::size_t i = 0; i < comp.size(); ++i)
        for (const auto& e : g.neighbors(comp[i]))
          if (member[e.id] == task.id && cut_mark[e.id] != cut_gen) {
            member[e.id] = comp_id;
            comp.push_back(e.id);
          }
      std::sort(comp.begin(), comp.end());
      stack.push_back({std::move(comp), prev, comp_id, task.depth + 1});
    }
  }

  compute_dfs_layout(t);
  return t;
}

HierarchyTree build_separator_hierarchy(const Graph& g) {
  BfsBisectionSeparator sep;
  return build_separator_hierarchy(g, sep);
}

namespace {

// Min-degree elimination order via dense bitset rows (quadratic scan; fine
// for the sizes this builder sees in tests and desk-scale graphs).
std::vector<vertex_t> min_degree_order_dense(const Graph& g) {
  const std::size_t n = g.num_vertices();
  const std::size_t words = (n + 63) / 64;
  std::vector<std::uint64_t> rows(n * words, 0);
  std::vector<std::uint32_t> deg(n, 0);
  std::vector<char> alive(n, 1);
  for (vertex_t v = 0; v < n; ++v) {
    std::uint64_t* row = rows.data() + v * words;
    for (const auto& e : g.neighbors(v)) row[e.id / 64] |= 1ull << (e.id % 64);
    deg[v] = static_cast<std::uint32_t>(g.neighbors(v).size());
  }

  std::vector<vertex_t> order;
  order.reserve(n);
  std::vector<vertex_t> nbrs;
  for (std::size_t step = 0; step < n; ++step) {
    vertex_t pick = kNoVertex;
    std::uint32_t best = kUnset;
    for (vertex_t v = 0; v < n; ++v)
      if (alive[v] && deg[v] < best) {
        best = deg[v];
        pick = v;
      }
    alive[pick] = 0;
    order.push_back(pick);

    const std::uint64_t* rp = rows.data() + static_cast<std::size_t>(pick) * words;
    nbrs.clear();
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t x = rp[w];
      while (x) {
        nbrs.push_back(static_cast<vertex_t>(w * 64 + std::countr_zero(x)));
        x &= x - 1;
      }
    }
    for (vertex_t u : nbrs) {
      std::uint64_t* ru = rows.data() + static_cast<std::size_t>(u) * words;
      std::uint32_t cnt = 0;
      for (std::size_t w = 0; w < words; ++w) {
        ru[w] |= rp[w];
        cnt += static_cast<std::uint32_t>(std::popcount(ru[w]));
      }
      ru[u / 64] &= ~(1ull << (u % 64));
      ru[pick / 64] &= ~(1ull << (pick % 64));
      // The OR result always contains u (u is in row[pick]) and pick (pick is
      // in row[u]); both bits were just cleared.
      deg[u] = cnt - 2;
    }
  }
  return order;
}

// Same simulation with sorted-vector rows and a set-based priority queue,
// for graphs too large for n*n/8 bitset storage.
std::vector<vertex_t> min_degree_order_sparse(const Graph& g) {
  const vertex_t n = g.num_vertices();
  std::vector<std::vector<vertex_t>> rows(n);
  std::set<std::pair<std::uint32_t, vertex_t>> heap;
  for (vertex_t v = 0; v < n; ++v) {
    auto nb = g.neighbors(v);
    rows[v].reserve(nb.size());
    for (const auto& e : nb) rows[v].push_back(e.id);
    heap.emplace(static_cast<std::uint32_t>(rows[v].size()), v);
  }

  std::vector<vertex_t> order;
  order.reserve(n);
  std::vector<vertex_t> merged;
  for (vertex_t step = 0; step < n; ++step) {
    auto [d, v] = *heap.begin();
    heap.erase(heap.begin());
    order.push_back(v);
    std::vector<vertex_t> nbrs = std::move(rows[v]);
    rows[v] = {};
    for (vertex_t u : nbrs)
      heap.erase({static_cast<std::uint32_t>(rows[u].size()), u});
    for (vertex_t u : nbrs) {
      merged.clear();
      merged.reserve(rows[u].size() + nbrs.size());
      // union of row(u) and nbrs, skipping u and v
      auto it1 = rows[u].begin(), end1 = rows[u].end();
      auto it2 = nbrs.begin(), end2 = nbrs.end();
      while (it1 != end1 || it2 != end2) {
        vertex_t x;
        if (it2 == end2 || (it1 != end1 && *it1 <= *it2)) {
          x = *it1;
          if (it2 != end2 && *it2 == x) ++it2;
          ++it1;
        } else {
          x = *it2++;
        }
        if (x != u && x != v) merged.push_back(x);
      }
      rows[u].swap(merged);
      heap.emplace(static_cast<std::uint32_t>(rows[u].size()), u);
    }
  }
  return order;
}

// Elimination tree of the filled graph, computed from the original edges
// with the ancestor-compression technique (no fill lists needed).
std::vector<vertex_t> elimination_tree(const Graph& g,
                                       const std::vector<vertex_t>& order) {
  const vertex_t n = g.num_vertices();
  std::vector<std::uint32_t> pos(n);
  for (std::uint32_t i = 0; i < n; ++i) pos[order[i]] = i;
  std::vector<vertex_t> parent(n, kNoVertex);
  std::vector<vertex_t> ancestor(n, kNoVertex);
  for (std::uint32_t i = 0; i < n; ++i) {
    vertex_t v = order[i];
    for (const auto& e : g.neighbors(v)) {
      if (pos[e.id] >= i) continue;
      vertex_t r = e.id;
      while (ancestor[r] != kNoVertex && ancestor[r] != v) {
        vertex_t next = ancestor[r];
        ancestor[r] = v;
        r = next;
      }
      if (ancestor[r] == kNoVertex) {
        ancestor[r] = v;
        parent[r] = v;
      }
    }
  }
  parent[order[n - 1]] = order[n - 1];
  return parent;
}

}  // namespace

HierarchyTree build_min_degree_hierarchy(const Graph& g) {
  if (!is_connected(g))
    throw Error(ErrorKind::disconnected, "hierarchy requires a connected graph");
  const vertex_t n = g.num_vertices();
  std::vector<vertex_t> order =
      n <= 8192 ? min_degree_order_dense(g) : min_degree_order_sparse(g);
  HierarchyTree t;
  t.parent = elimination_tree(g, order);
  t.root = order.back();
  compute_dfs_layout(t);
  return t;
}

std::optional<std::string> validate_tree_structure(const HierarchyTree& t) {
  const vertex_t n = t.num_vertices();
  auto fail = [](std::string msg) { return std::optional<std::string>(std::move(msg)); };

  if (n == 0) return fail("tree has no vertices");
  if (t.children.size() != n || t.dfs_pos.size() != n || t.dfs_start.size() != n ||
      t.dfs_size.size() != n || t.order.size() != n)
    return fail("tree arrays have inconsistent sizes");
  if (t.root >= n) return fail("root id out of range");

  vertex_t self_parents = 0;
  for (vertex_t v = 0; v < n; ++v) {
    if (t.parent[v] >= n)
      return fail("vertex " + std::to_string(v) + ": parent id out of range");
    if (t.parent[v] == v) ++self_parents;
  }
  if (self_parents != 1 || t.parent[t.root] != t.root)
    return fail("tree must have exactly one self-parented root");

  for (vertex_t v = 0; v < n; ++v) {
    std::vector<vertex_t> expect;
    for (vertex_t c = 0; c < n; ++c)
      if (c != t.root && t.parent[c] == v) expect.push_back(c);
    if (t.children[v] != expect)
      return fail("vertex " + std::to_string(v) + ": children list mismatch");
  }

  std::vector<char> seen(n, 0);
  for (vertex_t v : t.order) {
    if (v >= n || seen[v]) return fail("DFS order is not a permutation");
    seen[v] = 1;
  }
  for (vertex_t v = 0; v < n; ++v) {
    if (t.dfs_pos[v] != t.dfs_start[v])
      return fail("vertex " + std::to_string(v) + ": dfs_pos != dfs_start");
    if (t.dfs_start[v] >= n || t.order[t.dfs_start[v]] != v)
      return fail("vertex " + std::to_string(v) + ": dfs position inconsistent");
    if (t.dfs_size[v] == 0 || t.dfs_start[v] + t.dfs_size[v] > n)
      return fail("vertex " + std::to_string(v) + ": dfs interval out of bounds");
  }
  if (t.dfs_start[t.root] != 0 || t.dfs_size[t.root] != n)
    return fail("root interval must cover all vertices");
  for (vertex_t v = 0; v < n; ++v) {
    std::uint32_t sum = 1;
    for (vertex_t c : t.children[v]) {
      sum += t.dfs_size[c];
      if (t.dfs_start[c] <= t.dfs_start[v] ||
          t.dfs_start[c] + t.dfs_size[c] > t.dfs_start[v] + t.dfs_size[v])
        return fail("vertex " + std::to_string(c) +
                    ": dfs interval not nested inside its parent");
    }
    if (sum != t.dfs_size[v])
      return fail("vertex " + std::to_string(v) + ": dfs_size != 1 + children sizes");
  }
  return std::nullopt;
}

std::optional<std::string> validate_hierarchy(const Graph& g, const HierarchyTree& t) {
  const vertex_t n = g.num_vertices();
  if (t.parent.size() != n)
    return "tree covers a different vertex count than the graph";
  if (auto bad = validate_tree_structure(t)) return bad;

  auto fail = [](std::string msg) { return std::optional<std::string>(std::move(msg)); };
  for (vertex_t u = 0; u < n; ++u)
    for (const auto& e : g.neighbors(u)) {
      if (e.id < u) continue;
      if (!t.is_ancestor(u, e.id) && !t.is_ancestor(e.id, u))
        return fail("edge (" + g.label(u) + ", " + g.label(e.id) +
                    ") joins vertices with no ancestor relation");
    }
  return std::nullopt;
}

HierarchyStats hierarchy_stats(const HierarchyTree& t) {
  const vertex_t n = t.num_vertices();
  HierarchyStats s;
  std::vector<std::uint32_t> depth(n, 0);
  depth[t.root] = 1;
  for (vertex_t v : t.order) {  // preorder: parents precede children
    if (v != t.root) depth[v] = depth[t.parent[v]] + 1;
    s.h = std::max(s.h, depth[v]);
    s.s_total += t.dfs_size[v];
  }
  s.s_avg = static_cast<double>(s.s_total) / static_cast<double>(n);
  return s;
}

void dump_tree(const HierarchyTree& t, std::ostream& out) {
  for (vertex_t v : t.order)
    out << v << ' ' << t.parent[v] << ' ' << t.dfs_start[v] << ' ' << t.dfs_size[v]
        << '\n';
}

}  // namespace bdindex
