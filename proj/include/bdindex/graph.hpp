#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bdindex/types.hpp"

namespace bdindex {

enum class GraphFormat {
  plain_edge_list,  // "<u> <v> [<weight>]", '#'/'%' comments
  dimacs_gr,        // "p sp <n> <m>" header, "a <u> <v> <weight>" arcs
};

struct EdgeInput {
  vertex_t u;
  vertex_t v;
  double weight = 1.0;
};

struct NeighborEntry {
  vertex_t id;
  double weight;
};

// Undirected weighted graph in CSR form. Neighbor lists are sorted by id,
// contain no self-loops or duplicates, and every weight is positive.
class Graph {
 public:
  Graph() = default;

  // Parses an edge list. Collapses duplicate edges (equal weight required),
  // rejects self-loops, and requires the result to be non-empty and connected.
  static Graph load_edge_list(std::istream& in, GraphFormat format);
  static Graph load_edge_list_file(const std::string& path, GraphFormat format);

  // Builds a graph on vertices 0..n-1 from an explicit edge set. Labels
  // default to the decimal ids. Connectivity is NOT enforced here so tests
  // can build disconnected fixtures; loaders and index builders enforce it.
  static Graph from_edges(vertex_t n, std::span<const EdgeInput> edges,
                          std::vector<std::string> labels = {});

  vertex_t num_vertices() const { return n_; }
  std::uint64_t num_edges() const { return m_; }

  std::span<const NeighborEntry> neighbors(vertex_t v) const;

  // Weighted degree: sum of incident edge weights.
  double degree(vertex_t v) const;
  const std::vector<double>& degrees() const { return degree_; }

  double total_weight() const { return total_weight_; }

  const std::string& label(vertex_t v) const;
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<vertex_t> find_label(const std::string& label) const;

 private:
  void check_vertex(vertex_t v) const;
  void finalize(std::vector<std::string> labels);  // dedupe + CSR build

  vertex_t n_ = 0;
  std::uint64_t m_ = 0;
  double total_weight_ = 0.0;
  std::vector<std::size_t> offset_;
  std::vector<NeighborEntry> adj_;
  std::vector<double> degree_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, vertex_t> label_to_id_;
  std::vector<EdgeInput> pending_;  // staging area used by builders
};

// True iff one BFS from vertex 0 reaches all vertices. Errors on empty graph.
bool is_connected(const Graph& g);

}  // namespace bdindex
