// bd: build, query, benchmark, validate, and inspect biharmonic-distance
// indexes from the command line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bdindex/graph.hpp"
#include "bdindex/hierarchy.hpp"
#include "bdindex/index.hpp"
#include "bdindex/oracle.hpp"
#include "bdindex/query.hpp"
#include "bdindex/sampling.hpp"
#include "bdindex/types.hpp"

namespace {

using bdindex::BDIndex;
using bdindex::Error;
using bdindex::ErrorKind;
using bdindex::Graph;
using bdindex::GraphFormat;
using bdindex::HierarchyTree;
using bdindex::vertex_t;

struct RunConfig {
  std::string graph_path;
  std::string format = "plain";
  std::string index_path;
  std::string strategy = "separator";
  std::vector<std::string> pair;  // -p <s> <t>
  std::string pairs_file;
  std::uint64_t samples = 0;
  std::uint64_t seed = 42;
  std::string out_format = "jsonl";
  std::uint64_t top_k = 10;
  double removal_fraction = -1.0;
  unsigned workers = 1;
  bool all_pairs = false;
};

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

GraphFormat parse_format(const std::string& s) {
  return s == "dimacs" ? GraphFormat::dimacs_gr : GraphFormat::plain_edge_list;
}

HierarchyTree build_tree(const Graph& g, const std::string& strategy) {
  if (strategy == "min-degree") return bdindex::build_min_degree_hierarchy(g);
  return bdindex::build_separator_hierarchy(g);
}

vertex_t resolve_label(const BDIndex& idx, const std::string& label) {
  if (auto v = idx.find_label(label)) return *v;
  throw Error(ErrorKind::unknown_label, "unknown vertex label '" + label + "'");
}

void emit_results(const BDIndex& idx, const std::vector<bdindex::QueryResult>& results,
                  const std::string& out_format) {
  if (out_format == "csv") {
    std::cout << "s,t,bd,micros\n";
    for (const auto& r : results) {
      char micros[32];
      std::snprintf(micros, sizeof micros, "%.3f",
                    static_cast<double>(r.elapsed.count()) / 1000.0);
      std::cout << idx.id_map()[r.s] << ',' << idx.id_map()[r.t] << ','
                << fmt_double(r.bd) << ',' << micros << '\n';
    }
    return;
  }
  for (const auto& r : results) {
    nlohmann::ordered_json j;
    j["s"] = idx.id_map()[r.s];
    j["t"] = idx.id_map()[r.t];
    j["bd"] = r.bd;
    j["micros"] = static_cast<double>(r.elapsed.count()) / 1000.0;
    std::cout << j.dump() << '\n';
  }
}

int cmd_build(const RunConfig& cfg) {
  Graph g = Graph::load_edge_list_file(cfg.graph_path, parse_format(cfg.format));
  const auto t0 = std::chrono::steady_clock::now();
  HierarchyTree tree = build_tree(g, cfg.strategy);
  BDIndex idx = bdindex::build_index(g, std::move(tree));
  const auto t1 = std::chrono::steady_clock::now();
  std::uint64_t bytes = bdindex::save_index(idx, cfg.index_path);
  bdindex::HierarchyStats st = bdindex::hierarchy_stats(idx.tree());

  std::cout << "n: " << g.num_vertices() << '\n'
            << "m: " << g.num_edges() << '\n'
            << "strategy: " << cfg.strategy << '\n'
            << "h: " << st.h << '\n'
            << "s_avg: " << fmt_double(st.s_avg) << '\n'
            << "label_entries: " << idx.total_label_entries() << '\n'
            << "bytes_written: " << bytes << '\n'
            << "build_seconds: "
            << fmt_double(std::chrono::duration<double>(t1 - t0).count()) << '\n';
  return 0;
}

int cmd_query(const RunConfig& cfg) {
  BDIndex idx = bdindex::load_index(cfg.index_path);
  std::vector<std::pair<vertex_t, vertex_t>> pairs;

  if (!cfg.pair.empty() && !cfg.pairs_file.empty())
    throw Error(ErrorKind::bad_arguments, "give either -p or --pairs, not both");
  if (!cfg.pair.empty()) {
    pairs.emplace_back(resolve_label(idx, cfg.pair[0]), resolve_label(idx, cfg.pair[1]));
  } else if (!cfg.pairs_file.empty()) {
    std::ifstream in(cfg.pairs_file);
    if (!in) throw Error(ErrorKind::io_error, "cannot open '" + cfg.pairs_file + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::istringstream ls(line);
      std::string a, b, extra;
      if (!(ls >> a)) continue;  // blank line
      if (a[0] == '#') continue;
      if (!(ls >> b) || (ls >> extra))
        throw Error(ErrorKind::parse_error,
                    "pairs file line " + std::to_string(line_no) +
                        ": expected '<s_label> <t_label>'");
      pairs.emplace_back(resolve_label(idx, a), resolve_label(idx, b));
    }
  } else {
    throw Error(ErrorKind::bad_arguments, "one of -p or --pairs is required");
  }

  emit_results(idx, bdindex::batch_query(idx, pairs, cfg.workers), cfg.out_format);
  return 0;
}

int cmd_bench(const RunConfig& cfg) {
  BDIndex idx = bdindex::load_index(cfg.index_path);
  Graph g = Graph::load_edge_list_file(cfg.graph_path, parse_format(cfg.format));
  bdindex::verify_index_matches(idx, g);
  if (cfg.samples < 1)
    throw Error(ErrorKind::bad_arguments, "sample count must be at least 1");

  auto pairs = bdindex::sample_distinct_pairs(g.num_vertices(), cfg.samples, cfg.seed);
  auto results = bdindex::batch_query(idx, pairs, cfg.workers);

  std::vector<double> micros;
  micros.reserve(results.size());
  for (const auto& r : results)
    micros.push_back(static_cast<double>(r.elapsed.count()) / 1000.0);
  std::sort(micros.begin(), micros.end());
  double mean = 0.0;
  for (double v : micros) mean += v;
  mean /= static_cast<double>(micros.size());
  const std::size_t k = micros.size();
  double median = (k % 2 == 1) ? micros[k / 2] : (micros[k / 2 - 1] + micros[k / 2]) / 2.0;
  std::size_t p99_rank = static_cast<std::size_t>(
      std::ceil(0.99 * static_cast<double>(k)));
  double p99 = micros[std::min(k - 1, p99_rank == 0 ? 0 : p99_rank - 1)];

  std::cout << "seed: " << cfg.seed << '\n'
            << "samples: " << k << '\n'
            << "workers: " << cfg.workers << '\n'
            << "mean_micros: " << fmt_double(mean) << '\n'
            << "median_micros: " << fmt_double(median) << '\n'
            << "p99_micros: " << fmt_double(p99) << '\n';

  if (g.num_vertices() <= 4096) {
    bdindex::PseudoinverseBD oracle(g);
    double worst = 0.0;
    for (const auto& r : results) {
      double ref = oracle.bd(r.s, r.t);
      worst = std::max(worst, std::abs(r.bd - ref) / std::max(1.0, ref));
    }
    std::cout << "max_rel_error: " << fmt_double(worst) << '\n';
  } else {
    std::cout << "max_rel_error: skipped (n > 4096)\n";
  }
  return 0;
}

int cmd_stats(const RunConfig& cfg) {
  BDIndex idx = bdindex::load_index(cfg.index_path);
  bdindex::HierarchyStats st = bdindex::hierarchy_stats(idx.tree());
  std::uint64_t bytes = std::filesystem::file_size(cfg.index_path);
  std::cout << "n: " << idx.num_vertices() << '\n'
            << "h: " << st.h << '\n'
            << "s_avg: " << fmt_double(st.s_avg) << '\n'
            << "bytes: " << bytes << '\n';
  return 0;
}

int cmd_validate(const RunConfig& cfg) {
  Graph g = Graph::load_edge_list_file(cfg.graph_path, parse_format(cfg.format));
  const vertex_t n = g.num_vertices();
  if (n > 4096)
    throw Error(ErrorKind::size_guard,
                "validate is capped at n=4096 (dense oracles), got n=" +
                    std::to_string(n));

  BDIndex idx;
  if (!cfg.index_path.empty()) {
    idx = bdindex::load_index(cfg.index_path);
    bdindex::verify_index_matches(idx, g);
  } else {
    idx = bdindex::build_index(g, build_tree(g, cfg.strategy));
  }
  const HierarchyTree& tree = idx.tree();

  bool ok = true;
  auto report = [&](const std::string& name, bool pass, const std::string& detail) {
    std::cout << name << ": " << (pass ? "PASS" : "FAIL") << " (" << detail << ")\n";
    ok = ok && pass;
  };

  if (auto bad = bdindex::validate_hierarchy(g, tree))
    report("hierarchy", false, *bad);
  else
    report("hierarchy", true, "all invariants hold");

  {
    double worst = 0.0;
    for (vertex_t v = 0; v < n; ++v) {
      bdindex::NodeLabel ref = bdindex::direct_label_oracle(g, tree, v);
      auto built = idx.label_vector(v);
      double norm = 0.0;
      for (double x : ref.m) norm = std::max(norm, std::abs(x));
      double dev = std::abs(idx.label_f(v) - ref.f);
      for (std::size_t i = 0; i < ref.m.size(); ++i)
        dev = std::max(dev, std::abs(built[i] - ref.m[i]));
      worst = std::max(worst, dev / (1.0 + norm));
    }
    report("labels_vs_dense_oracle", worst <= 1e-9, "worst=" + fmt_double(worst));
  }

  {
    bdindex::PseudoinverseBD oracle(g);
    std::vector<std::pair<vertex_t, vertex_t>> pairs;
    const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    if (cfg.all_pairs || total <= 200) {
      pairs.reserve(total);
      for (vertex_t s = 0; s < n; ++s)
        for (vertex_t t = s + 1; t < n; ++t) pairs.emplace_back(s, t);
    } else {
      pairs = bdindex::sample_distinct_pairs(n, 200, cfg.seed);
    }
    double worst = 0.0;
    bdindex::TauVector a, b;
    for (auto [s, t] : pairs) {
      double ref = oracle.bd(s, t);
      double got = bdindex::query_bd(idx, s, t, a, b).bd;
      worst = std::max(worst, std::abs(got - ref) / std::max(1.0, ref));
    }
    report("bd_vs_pseudoinverse",
           worst <= 1e-9,
           "pairs=" + std::to_string(pairs.size()) + " worst=" + fmt_double(worst));
  }

  if (n <= 256) {
    std::vector<vertex_t> order;
    order.reserve(n - 1);
    for (vertex_t v = 0; v < n; ++v)
      if (v != tree.root) order.push_back(v);
    std::mt19937_64 rng(cfg.seed);
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      std::size_t j = i + bdindex::bounded_rand(rng, order.size() - i);
      std::swap(order[i], order[j]);
    }
    double dev = bdindex::cut_decomposition_check(g, tree.root, order);
    report("cut_decomposition", dev <= 1e-10, "worst=" + fmt_double(dev));
  } else {
    std::cout << "cut_decomposition: SKIP (n > 256)\n";
  }

  return ok ? 0 : 1;
}

int cmd_centrality(const RunConfig& cfg) {
  BDIndex idx = bdindex::load_index(cfg.index_path);
  Graph g = Graph::load_edge_list_file(cfg.graph_path, parse_format(cfg.format));
  bdindex::verify_index_matches(idx, g);

  auto top = bdindex::edge_centrality(idx, g, cfg.top_k);
  std::cout << "u,v,bd\n";
  for (const auto& e : top)
    std::cout << g.label(e.u) << ',' << g.label(e.v) << ',' << fmt_double(e.bd) << '\n';

  if (cfg.removal_fraction >= 0.0) {
    if (cfg.removal_fraction > 1.0)
      throw Error(ErrorKind::bad_arguments, "removal fraction must be in [0,1]");
    auto ranked = bdindex::edge_centrality(idx, g, g.num_edges());
    const auto remove_count = static_cast<std::size_t>(
        std::floor(cfg.removal_fraction * static_cast<double>(g.num_edges())));
    std::unordered_set<std::uint64_t> removed;
    removed.reserve(remove_count * 2);
    for (std::size_t i = 0; i < remove_count; ++i)
      removed.insert((static_cast<std::uint64_t>(ranked[i].u) << 32) | ranked[i].v);

    const vertex_t n = g.num_vertices();
    std::vector<std::uint32_t> comp(n, 0);
    std::uint32_t num_comp = 0;
    std::size_t largest = 0;
    for (vertex_t v0 = 0; v0 < n; ++v0) {
      if (comp[v0] != 0) continue;
      ++num_comp;
      std::size_t size = 0;
      std::vector<vertex_t> queue{v0};
      comp[v0] = num_comp;
      while (!queue.empty()) {
        vertex_t v = queue.back();
        queue.pop_back();
        ++size;
        for (const auto& e : g.neighbors(v)) {
          std::uint64_t key = (static_cast<std::uint64_t>(std::min(v, e.id)) << 32) |
                              std::max(v, e.id);
          if (removed.count(key) || comp[e.id] != 0) continue;
          comp[e.id] = num_comp;
          queue.push_back(e.id);
        }
      }
      largest = std::max(largest, size);
    }

    std::mt19937_64 rng(cfg.seed);
    const std::size_t trials = 1000;
    std::size_t reachable = 0;
    for (std::size_t i = 0; i < trials; ++i) {
      auto s = static_cast<vertex_t>(bdindex::bounded_rand(rng, n));
      vertex_t t = s;
      while (t == s) t = static_cast<vertex_t>(bdindex::bounded_rand(rng, n));
      if (comp[s] == comp[t]) ++reachable;
    }

    std::cout << "removal_report:\n"
              << "  removed_edges: " << remove_count << '\n'
              << "  lcc_fraction: "
              << fmt_double(static_cast<double>(largest) / static_cast<double>(n))
              << '\n'
              << "  components: " << num_comp << '\n'
              << "  reachability: "
              << fmt_double(static_cast<double>(reachable) /
                            static_cast<double>(trials))
              << '\n';
  }
  return 0;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::bad_arguments:
    case ErrorKind::unknown_label:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact biharmonic-distance queries over a hierarchical index"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "graph file format")
        ->check(CLI::IsMember({"plain", "dimacs"}));
  };

  CLI::App* build = app.add_subcommand("build", "construct an index from a graph");
  build->add_option("-g,--graph", cfg.graph_path, "input graph file")->required();
  add_format(build);
  build->add_option("--strategy", cfg.strategy, "hierarchy strategy")
      ->required()
      ->check(CLI::IsMember({"separator", "min-degree"}));
  build->add_option("-o,--output", cfg.index_path, "output index file")->required();

  CLI::App* query = app.add_subcommand("query", "answer BD queries from an index");
  query->add_option("-i,--index", cfg.index_path, "index file")->required();
  query->add_option("-p,--pair", cfg.pair, "one query: <s_label> <t_label>")
      ->expected(2);
  query->add_option("--pairs", cfg.pairs_file, "file with '<s_label> <t_label>' lines");
  query->add_option("--out", cfg.out_format, "output format")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  query->add_option("--workers", cfg.workers, "worker threads");

  CLI::App* bench = app.add_subcommand("bench", "time seeded random queries");
  bench->add_option("-i,--index", cfg.index_path, "index file")->required();
  bench->add_option("-g,--graph", cfg.graph_path, "graph the index was built from")
      ->required();
  add_format(bench);
  bench->add_option("-k,--samples", cfg.samples, "number of distinct pairs")->required();
  bench->add_option("--seed", cfg.seed, "sampler seed");
  bench->add_option("--workers", cfg.workers, "worker threads");

  CLI::App* validate = app.add_subcommand("validate", "check an index against dense oracles");
  validate->add_option("-g,--graph", cfg.graph_path, "input graph file")->required();
  add_format(validate);
  validate->add_option("--strategy", cfg.strategy, "hierarchy strategy")
      ->check(CLI::IsMember({"separator", "min-degree"}));
  validate->add_option("-i,--index", cfg.index_path,
                       "validate this index file instead of building one");
  validate->add_flag("--all-pairs", cfg.all_pairs, "compare every vertex pair");
  validate->add_option("--seed", cfg.seed, "sampling seed");

  CLI::App* centrality = app.add_subcommand("centrality", "rank edges by BD");
  centrality->add_option("-i,--index", cfg.index_path, "index file")->required();
  centrality->add_option("-g,--graph", cfg.graph_path, "graph the index was built from")
      ->required();
  add_format(centrality);
  centrality->add_option("--top", cfg.top_k, "how many edges to print");
  centrality->add_option("--removal-report", cfg.removal_fraction,
                         "remove this fraction of top edges and report connectivity");
  centrality->add_option("--seed", cfg.seed, "seed for reachability sampling");

  CLI::App* stats = app.add_subcommand("stats", "print index statistics");
  stats->add_option("-i,--index", cfg.index_path, "index file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (build->parsed()) return cmd_build(cfg);
    if (query->parsed()) return cmd_query(cfg);
    if (bench->parsed()) return cmd_bench(cfg);
    if (validate->parsed()) return cmd_validate(cfg);
    if (centrality->parsed()) return cmd_centrality(cfg);
    if (stats->parsed()) return cmd_stats(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
