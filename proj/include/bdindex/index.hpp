#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bdindex/graph.hpp"
#include "bdindex/hierarchy.hpp"
#include "bdindex/types.hpp"

namespace bdindex {

// One vertex's label: m over Desc(v) in DFS-relative addressing (entry i
// belongs to order[dfs_start(v)+i], so m[0] is v itself and equals 1), plus
// the scalar f.
struct NodeLabel {
  std::vector<double> m;
  double f = 0.0;
};

// The queryable index: hierarchy tree plus per-vertex labels in one flat
// value array. Immutable once built or loaded.
class BDIndex {
 public:
  BDIndex() = default;

  const HierarchyTree& tree() const { return tree_; }
  vertex_t num_vertices() const { return tree_.num_vertices(); }

  std::span<const double> label_vector(vertex_t v) const {
    return {values_.data() + offset_[v], tree_.dfs_size[v]};
  }
  double label_f(vertex_t v) const { return f_[v]; }
  std::uint64_t label_offset(vertex_t v) const { return offset_[v]; }
  std::uint64_t total_label_entries() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }

  // Weighted degrees kept for diagnostics; empty on a deserialized index
  // (they are not part of the file format).
  const std::vector<double>& degrees() const { return degrees_; }

  const std::vector<std::string>& id_map() const { return id_map_; }
  std::optional<vertex_t> find_label(const std::string& label) const;

 private:
  friend BDIndex build_index(const Graph& g, HierarchyTree tree);
  friend BDIndex deserialize_index(std::istream& in);
  void rebuild_lookup();

  HierarchyTree tree_;
  std::vector<std::uint64_t> offset_;  // units of 8-byte reals into values_
  std::vector<double> values_;         // concatenated m vectors, owner DFS order
  std::vector<double> f_;
  std::vector<double> degrees_;
  std::vector<std::string> id_map_;
  std::unordered_map<std::string, vertex_t> label_lookup_;
};

// Bottom-up label construction over the given hierarchy (which must pass
// validate_hierarchy). Processes vertices in reverse DFS order so every
// proper descendant's label is final before it contributes.
BDIndex build_index(const Graph& g, HierarchyTree tree);

// Independent per-vertex reference: solves L_S m' = a_v directly on
// S = Desc(v)\{v} (principal submatrix of the full Laplacian) and returns
// {[1, m'], f = d_v - a_v . m'}. Test oracle; |Desc(v)| capped at 4096.
NodeLabel direct_label_oracle(const Graph& g, const HierarchyTree& t, vertex_t v);

// Little-endian binary format: magic "BDIX", version u32, n u64, root u64,
// per-vertex arrays (parent u64, dfs_start u64, dfs_size u64, label_offset
// u64, f f64), the flat value array, n length-prefixed (u32) UTF-8 labels,
// and a trailing CRC32C over all preceding bytes. Returns bytes written.
std::uint64_t serialize_index(const BDIndex& idx, std::ostream& out);
BDIndex deserialize_index(std::istream& in);

std::uint64_t save_index(const BDIndex& idx, const std::string& path);
BDIndex load_index(const std::string& path);

// Throws Error(mismatch) naming the first disagreement when the index was
// not built over this graph (different n or id map).
void verify_index_matches(const BDIndex& idx, const Graph& g);

}  // namespace bdindex
