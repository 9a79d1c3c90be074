#include "bdindex/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_map>

namespace bdindex {

namespace {

std::string_view strip(std::string_view s) {
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  std::size_t e = s.size();
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw Error(ErrorKind::parse_error,
              "parse error at line " + std::to_string(line_no) + ": " + what);
}

double parse_weight(std::string_view tok, std::size_t line_no) {
  double w = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), w);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    parse_fail(line_no, "bad weight '" + std::string(tok) + "'");
  if (!std::isfinite(w) || w <= 0.0)
    parse_fail(line_no, "weight must be positive, got '" + std::string(tok) + "'");
  return w;
}

std::uint64_t parse_uint(std::string_view tok, std::size_t line_no) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    parse_fail(line_no, "bad integer '" + std::string(tok) + "'");
  return v;
}

// Key for an unordered vertex pair.
std::uint64_t pair_key(vertex_t a, vertex_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

Graph parse_plain(std::istream& in) {
  std::unordered_map<std::string, vertex_t> ids;
  std::vector<std::string> labels;
  std::vector<EdgeInput> edges;

  auto intern = [&](std::string_view tok) -> vertex_t {
    auto it = ids.find(std::string(tok));
    if (it != ids.end()) return it->second;
    vertex_t id = static_cast<vertex_t>(labels.size());
    labels.emplace_back(tok);
    ids.emplace(labels.back(), id);
    return id;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = strip(line);
    if (body.empty() || body[0] == '#' || body[0] == '%') continue;
    auto toks = split_ws(body);
    if (toks.size() != 2 && toks.size() != 3)
      parse_fail(line_no, "expected '<u> <v> [<weight>]'");
    if (!all_digits(toks[0]) || !all_digits(toks[1]))
      parse_fail(line_no, "vertex labels must be nonnegative integers");
    if (toks[0] == toks[1])
      throw Error(ErrorKind::self_loop, "self-loop at line " +
                                            std::to_string(line_no) + ": vertex '" +
                                            std::string(toks[0]) + "'");
    double w = toks.size() == 3 ? parse_weight(toks[2], line_no) : 1.0;
    vertex_t u = intern(toks[0]);
    vertex_t v = intern(toks[1]);
    edges.push_back({u, v, w});
  }
  if (labels.empty()) throw Error(ErrorKind::empty_graph, "edge list has no vertices");
  // Read the size before std::move(labels): argument evaluation order is
  // unspecified, so labels.size() inside the call could observe the moved-from
  // vector.
  const vertex_t vertex_count = static_cast<vertex_t>(labels.size());
  return Graph::from_edges(vertex_count, edges, std::move(labels));
}

Graph parse_dimacs(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::uint64_t n = 0, m = 0, arcs_seen = 0;

  struct ArcInfo {
    double weight;
    bool fwd = false;  // arc (min -> max) seen
    bool rev = false;  // arc (max -> min) seen
  };
  std::unordered_map<std::uint64_t, ArcInfo> arcs;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = strip(line);
    if (body.empty() || body[0] == 'c') continue;
    auto toks = split_ws(body);
    if (toks[0] == "p") {
      if (have_header) parse_fail(line_no, "duplicate problem line");
      if (toks.size() != 4 || toks[1] != "sp")
        parse_fail(line_no, "expected 'p sp <n> <m>'");
      n = parse_uint(toks[2], line_no);
      m = parse_uint(toks[3], line_no);
      if (n > static_cast<std::uint64_t>(kNoVertex))
        parse_fail(line_no, "vertex count too large");
      have_header = true;
    } else if (toks[0] == "a") {
      if (!have_header) parse_fail(line_no, "arc before problem line");
      if (toks.size() != 4) parse_fail(line_no, "expected 'a <u> <v> <weight>'");
      std::uint64_t u = parse_uint(toks[1], line_no);
      std::uint64_t v = parse_uint(toks[2], line_no);
      if (u < 1 || u > n || v < 1 || v > n)
        parse_fail(line_no, "vertex id out of range 1.." + std::to_string(n));
      if (u == v)
        throw Error(ErrorKind::self_loop, "self-loop at line " +
                                              std::to_string(line_no) +
                                              ": vertex '" + std::to_string(u) + "'");
      double w = parse_weight(toks[3], line_no);
      ++arcs_seen;
      vertex_t a = static_cast<vertex_t>(std::min(u, v) - 1);
      vertex_t b = static_cast<vertex_t>(std::max(u, v) - 1);
      bool forward = (u < v);
      auto [it, fresh] = arcs.try_emplace(pair_key(a, b), ArcInfo{w});
      if (!fresh && it->second.weight != w)
        throw Error(ErrorKind::edge_conflict,
                    "arcs between '" + std::to_string(a + 1) + "' and '" +
                        std::to_string(b + 1) + "' disagree on weight (" +
                        std::to_string(it->second.weight) + " vs " +
                        std::to_string(w) + ")");
      if (forward)
        it->second.fwd = true;
      else
        it->second.rev = true;
    } else {
      parse_fail(line_no, "unknown line type '" + std::string(toks[0]) + "'");
    }
  }
  if (!have_header) throw Error(ErrorKind::parse_error, "missing 'p sp' problem line");
  if (n == 0) throw Error(ErrorKind::empty_graph, "header declares zero vertices");
  if (arcs_seen != m)
    throw Error(ErrorKind::parse_error,
                "header declares " + std::to_string(m) + " arcs but file has " +
                    std::to_string(arcs_seen));

  std::vector<EdgeInput> edges;
  edges.reserve(arcs.size());
  for (const auto& [key, info] : arcs) {
    vertex_t a = static_cast<vertex_t>(key >> 32);
    vertex_t b = static_cast<vertex_t>(key & 0xffffffffu);
    edges.push_back({a, b, info.weight});
  }
  std::vector<std::string> labels(n);
  for (std::uint64_t v = 0; v < n; ++v) labels[v] = std::to_string(v + 1);
  return Graph::from_edges(static_cast<vertex_t>(n), edges, std::move(labels));
}

}  // namespace

Graph Graph::load_edge_list(std::istream& in, GraphFormat format) {
  Graph g = format == GraphFormat::plain_edge_list ? parse_plain(in) : parse_dimacs(in);
  if (!is_connected(g)) {
    // Name one vertex from each of two components.
    std::vector<char> seen(g.num_vertices(), 0);
    std::vector<vertex_t> queue{0};
    seen[0] = 1;
    for (std::size_t i = 0; i < queue.size(); ++i)
      for (const auto& e : g.neighbors(queue[i]))
        if (!seen[e.id]) {
          seen[e.id] = 1;
          queue.push_back(e.id);
        }
    vertex_t other = kNoVertex;
    for (vertex_t v = 0; v < g.num_vertices(); ++v)
      if (!seen[v]) {
        other = v;
        break;
      }
    throw Error(ErrorKind::disconnected,
                "graph is disconnected: no path between '" + g.label(0) +
                    "' and '" + g.label(other) + "'");
  }
  return g;
}

Graph Graph::load_edge_list_file(const std::string& path, GraphFormat format) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open '" + path + "'");
  return load_edge_list(in, format);
}

Graph Graph::from_edges(vertex_t n, std::span<const EdgeInput> edges,
                        std::vector<std::string> labels) {
  if (n == 0) throw Error(ErrorKind::empty_graph, "graph has no vertices");
  Graph g;
  g.n_ = n;
  g.pending_.assign(edges.begin(), edges.end());
  for (const auto& e : g.pending_) {
    if (e.u >= n || e.v >= n)
      throw Error(ErrorKind::out_of_range,
                  "edge endpoint " + std::to_string(std::max(e.u, e.v)) +
                      " out of range for n=" + std::to_string(n));
    if (e.u == e.v)
      throw Error(ErrorKind::self_loop,
                  "self-loop on vertex " + std::to_string(e.u));
    if (!std::isfinite(e.weight) || e.weight <= 0.0)
      throw Error(ErrorKind::parse_error,
                  "edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                      ") has non-positive weight");
  }
  g.finalize(std::move(labels));
  return g;
}

void Graph::finalize(std::vector<std::string> labels) {
  if (labels.empty()) {
    labels.resize(n_);
    for (vertex_t v = 0; v < n_; ++v) labels[v] = std::to_string(v);
  }
  if (labels.size() != n_)
    throw Error(ErrorKind::parse_error, "label count does not match vertex count");
  labels_ = std::move(labels);
  label_to_id_.reserve(n_);
  for (vertex_t v = 0; v < n_; ++v) {
    if (!label_to_id_.emplace(labels_[v], v).second)
      throw Error(ErrorKind::parse_error, "duplicate vertex label '" + labels_[v] + "'");
  }

  std::unordered_map<std::uint64_t, double> dedup;
  dedup.reserve(pending_.size());
  for (const auto& e : pending_) {
    auto [it, fresh] = dedup.try_emplace(pair_key(e.u, e.v), e.weight);
    if (!fresh && it->second != e.weight)
      throw Error(ErrorKind::edge_conflict,
                  "duplicate edge between '" + labels_[e.u] + "' and '" +
                      labels_[e.v] + "' with different weights");
  }
  pending_.clear();
  pending_.shrink_to_fit();

  m_ = dedup.size();
  std::vector<std::uint32_t> count(n_, 0);
  for (const auto& [key, w] : dedup) {
    ++count[static_cast<vertex_t>(key >> 32)];
    ++count[static_cast<vertex_t>(key & 0xffffffffu)];
  }
  offset_.assign(n_ + 1, 0);
  for (vertex_t v = 0; v < n_; ++v) offset_[v + 1] = offset_[v] + count[v];
  adj_.resize(offset_[n_]);
  std::vector<std::size_t> cursor(offset_.begin(), offset_.end() - 1);
  for (const auto& [key, w] : dedup) {
    auto a = static_cast<vertex_t>(key >> 32);
    auto b = static_cast<vertex_t>(key & 0xffffffffu);
    adj_[cursor[a]++] = {b, w};
    adj_[cursor[b]++] = {a, w};
  }
  for (vertex_t v = 0; v < n_; ++v)
    std::sort(adj_.begin() + static_cast<std::ptrdiff_t>(offset_[v]),
              adj_.begin() + static_cast<std::ptrdiff_t>(offset_[v + 1]),
              [](const NeighborEntry& x, const NeighborEntry& y) { return x.id < y.id; });

  degree_.assign(n_, 0.0);
  total_weight_ = 0.0;
  for (vertex_t v = 0; v < n_; ++v) {
    double d = 0.0;
    for (std::size_t i = offset_[v]; i < offset_[v + 1]; ++i) d += adj_[i].weight;
    degree_[v] = d;
    total_weight_ += d;
  }
  total_weight_ /= 2.0;
}

void Graph::check_vertex(vertex_t v) const {
  if (v >= n_)
    throw Error(ErrorKind::out_of_range, "vertex id " + std::to_string(v) +
                                             " out of range for n=" + std::to_string(n_));
}

std::span<const NeighborEntry> Graph::neighbors(vertex_t v) const {
  check_vertex(v);
  return {adj_.data() + offset_[v], offset_[v + 1] - offset_[v]};
}

double Graph::degree(vertex_t v) const {
  check_vertex(v);
  return degree_[v];
}

const std::string& Graph::label(vertex_t v) const {
  check_vertex(v);
  return labels_[v];
}

std::optional<vertex_t> Graph::find_label(const std::string& label) const {
  auto it = label_to_id_.find(label);
  if (it == label_to_id_.end()) return std::nullopt;
  return it->second;
}

bool is_connected(const Graph& g) {
  if (g.num_vertices() == 0)
    throw Error(ErrorKind::empty_graph, "graph has no vertices");
  std::vector<char> seen(g.num_vertices(), 0);
  std::vector<vertex_t> queue{0};
  seen[0] = 1;
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (const auto& e : g.neighbors(queue[i]))
      if (!seen[e.id]) {
        seen[e.id] = 1;
        queue.push_back(e.id);
      }
  return queue.size() == g.num_vertices();
}

}  // namespace bdindex
