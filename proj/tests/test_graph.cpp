// Graph loading, validation, and adjacency queries.

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bdindex/graph.hpp"
#include "bdindex/types.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace bdindex;
using testsupport::kind_of;
using testsupport::random_connected;

namespace {

Graph load_plain(const std::string& text) {
  std::istringstream in(text);
  return Graph::load_edge_list(in, GraphFormat::plain_edge_list);
}

Graph load_dimacs(const std::string& text) {
  std::istringstream in(text);
  return Graph::load_edge_list(in, GraphFormat::dimacs_gr);
}

}  // namespace

TEST_CASE("plain edge list: path on three vertices") {
  Graph g = load_plain("0 1\n1 2\n");
  CHECK(g.num_vertices() == 3);
  CHECK(g.num_edges() == 2);
  CHECK(g.degree(0) == doctest::Approx(1.0));
  CHECK(g.degree(1) == doctest::Approx(2.0));
  CHECK(g.degree(2) == doctest::Approx(1.0));
  CHECK(is_connected(g));
}

TEST_CASE("plain edge list: comments skipped, duplicate edges collapsed") {
  Graph g = load_plain("# c\n5 7\n7 5\n");
  CHECK(g.num_vertices() == 2);
  CHECK(g.num_edges() == 1);
  CHECK(g.label(0) == "5");
  CHECK(g.label(1) == "7");
  CHECK(g.find_label("7") == vertex_t{1});
  CHECK(!g.find_label("6").has_value());

  Graph h = load_plain("% also a comment\n0 1\n\n   \n1 0\n");
  CHECK(h.num_edges() == 1);
}

TEST_CASE("plain edge list: labels interned in first-appearance order") {
  Graph g = load_plain("7 3\n3 1\n");
  CHECK(g.label(0) == "7");
  CHECK(g.label(1) == "3");
  CHECK(g.label(2) == "1");
  CHECK(g.find_label("1") == vertex_t{2});
}

TEST_CASE("plain edge list: explicit weights") {
  Graph g = load_plain("0 1 2.5\n1 2 0.25\n");
  CHECK(g.degree(0) == doctest::Approx(2.5));
  CHECK(g.degree(1) == doctest::Approx(2.75));
  CHECK(g.total_weight() == doctest::Approx(2.75));
  auto nb = g.neighbors(1);
  REQUIRE(nb.size() == 2);
  CHECK(nb[0].id == 0);
  CHECK(nb[0].weight == doctest::Approx(2.5));
  CHECK(nb[1].id == 2);
  CHECK(nb[1].weight == doctest::Approx(0.25));
}

TEST_CASE("plain edge list: error kinds") {
  CHECK(kind_of([] { load_plain("0 1\n2 3\n"); }) == ErrorKind::disconnected);
  CHECK(kind_of([] { load_plain("3 3\n"); }) == ErrorKind::self_loop);
  CHECK(kind_of([] { load_plain(""); }) == ErrorKind::empty_graph);
  CHECK(kind_of([] { load_plain("# only a comment\n"); }) == ErrorKind::empty_graph);
  CHECK(kind_of([] { load_plain("0\n"); }) == ErrorKind::parse_error);
  CHECK(kind_of([] { load_plain("0 1 2 3\n"); }) == ErrorKind::parse_error);
  CHECK(kind_of([] { load_plain("a b\n"); }) == ErrorKind::parse_error);
  CHECK(kind_of([] { load_plain("0 1 zz\n"); }) == ErrorKind::parse_error);
  CHECK(kind_of([] { load_plain("0 1 -2\n"); }) == ErrorKind::parse_error);
  CHECK(kind_of([] { load_plain("0 1 0\n"); }) == ErrorKind::parse_error);
  CHECK(kind_of([] { load_plain("0 1 1.0\n1 0 2.0\n"); }) == ErrorKind::edge_conflict);
}

TEST_CASE("plain edge list: parse errors carry the line number") {
  try {
    load_plain("0 1\n# fine\n0 1 bad\n");
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  try {
    load_plain("0 1\n2 3\n");
    FAIL("expected disconnected error");
  } catch (const Error& e) {
    // Message names one vertex from each component.
    std::string msg = e.what();
    CHECK(msg.find("'0'") != std::string::npos);
    CHECK(msg.find("'2'") != std::string::npos);
  }
}

TEST_CASE("plain edge list: reordering lines preserves the graph") {
  Graph a = load_plain("0 1\n1 2\n0 2\n");
  Graph b = load_plain("0 1\n1 2\n2 0\n");  // same first-appearance order
  REQUIRE(a.num_vertices() == b.num_vertices());
  REQUIRE(a.num_edges() == b.num_edges());
  for (vertex_t v = 0; v < a.num_vertices(); ++v) {
    CHECK(a.label(v) == b.label(v));
    auto na = a.neighbors(v);
    auto nb = b.neighbors(v);
    REQUIRE(na.size() == nb.size());
    for (std::size_t i = 0; i < na.size(); ++i) {
      CHECK(na[i].id == nb[i].id);
      CHECK(na[i].weight == nb[i].weight);
    }
  }
}

TEST_CASE("dimacs: reciprocal arcs collapse to one undirected edge") {
  Graph g = load_dimacs(
      "c comment\n"
      "p sp 3 4\n"
      "a 1 2 1.5\n"
      "a 2 1 1.5\n"
      "a 2 3 2\n"
      "a 3 2 2\n");
  CHECK(g.num_vertices() == 3);
  CHECK(g.num_edges() == 2);
  CHECK(g.label(0) == "1");
  CHECK(g.label(2) == "3");
  CHECK(g.degree(1) == doctest::Approx(3.5));
}

TEST_CASE("dimacs: error kinds") {
  CHECK(kind_of([] { load_dimacs("a 1 2 1\n"); }) == ErrorKind::parse_error);  // arc first
  CHECK(kind_of([] { load_dimacs("p sp 2 1\n"); }) == ErrorKind::parse_error);  // count short
  CHECK(kind_of([] { load_dimacs("p sp 2 1\na 1 3 1\n"); }) == ErrorKind::parse_error);
  CHECK(kind_of([] { load_dimacs("p sp 2 1\na 1 1 1\n"); }) == ErrorKind::self_loop);
  CHECK(kind_of([] { load_dimacs("p sp 0 0\n"); }) == ErrorKind::empty_graph);
  CHECK(kind_of([] { load_dimacs("q sp 2 1\n"); }) == ErrorKind::parse_error);
  CHECK(kind_of([] { load_dimacs("p sp 2 2\na 1 2 1\na 2 1 3\n"); }) ==
        ErrorKind::edge_conflict);
  CHECK(kind_of([] {
          load_dimacs("p sp 4 2\na 1 2 1\na 3 4 1\n");
        }) == ErrorKind::disconnected);
}

TEST_CASE("from_edges: validation") {
  std::vector<EdgeInput> ok{{0, 1, 1.0}};
  CHECK(Graph::from_edges(2, ok).num_edges() == 1);

  std::vector<EdgeInput> none;
  CHECK(kind_of([&] { Graph::from_edges(0, none); }) == ErrorKind::empty_graph);

  std::vector<EdgeInput> oob{{0, 5, 1.0}};
  CHECK(kind_of([&] { Graph::from_edges(2, oob); }) == ErrorKind::out_of_range);

  std::vector<EdgeInput> loop{{1, 1, 1.0}};
  CHECK(kind_of([&] { Graph::from_edges(2, loop); }) == ErrorKind::self_loop);

  std::vector<EdgeInput> zero{{0, 1, 0.0}};
  CHECK(kind_of([&] { Graph::from_edges(2, zero); }) == ErrorKind::parse_error);

  std::vector<EdgeInput> conflict{{0, 1, 1.0}, {1, 0, 2.0}};
  CHECK(kind_of([&] { Graph::from_edges(2, conflict); }) == ErrorKind::edge_conflict);

  // Duplicate with agreeing weight collapses silently.
  std::vector<EdgeInput> dup{{0, 1, 2.0}, {1, 0, 2.0}};
  Graph g = Graph::from_edges(2, dup);
  CHECK(g.num_edges() == 1);
  CHECK(g.degree(0) == doctest::Approx(2.0));
}

TEST_CASE("is_connected") {
  CHECK(is_connected(testsupport::p3()));
  std::vector<EdgeInput> split{{0, 1, 1.0}, {2, 3, 1.0}};
  CHECK(!is_connected(Graph::from_edges(4, split)));
  std::vector<EdgeInput> none;
  CHECK(is_connected(Graph::from_edges(1, none)));  // single vertex, vacuous
}

TEST_CASE("neighbors: sorted, stable, range-checked") {
  Graph g = testsupport::p3();
  auto nb = g.neighbors(1);
  REQUIRE(nb.size() == 2);
  CHECK(nb[0].id == 0);
  CHECK(nb[1].id == 2);
  CHECK(g.neighbors(0).size() == 1);
  CHECK(g.neighbors(0)[0].id == 1);
  CHECK(kind_of([&] { g.neighbors(3); }) == ErrorKind::out_of_range);
  CHECK(kind_of([&] { g.degree(3); }) == ErrorKind::out_of_range);
  CHECK(kind_of([&] { g.label(3); }) == ErrorKind::out_of_range);
}

TEST_CASE("handshake identity on random graphs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto n = static_cast<vertex_t>(2 + bounded_rand(rng, 40));
    Graph g = random_connected(n, 0.2, rng, /*weighted=*/true);
    double sum_deg = 0.0;
    for (vertex_t v = 0; v < n; ++v) sum_deg += g.degree(v);
    CHECK(sum_deg == doctest::Approx(2.0 * g.total_weight()).epsilon(1e-12));
    // Every neighbor list is sorted strictly ascending and symmetric.
    for (vertex_t v = 0; v < n; ++v) {
      auto nb = g.neighbors(v);
      for (std::size_t i = 0; i + 1 < nb.size(); ++i) CHECK(nb[i].id < nb[i + 1].id);
      for (const auto& e : nb) {
        bool back = false;
        for (const auto& r : g.neighbors(e.id))
          if (r.id == v && r.weight == e.weight) back = true;
        CHECK(back);
      }
    }
  }
}
