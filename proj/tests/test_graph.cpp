#include "doctest.h"

#include <numeric>
#include <sstream>

#include "asnkit/graph.hpp"
#include "asnkit/rng.hpp"

using namespace asnkit;

TEST_CASE("load_graph parses a minimal path graph") {
  auto lg = load_graph_string("0 1\n1 2\n");
  CHECK(lg.graph.node_count() == 3);
  CHECK(lg.graph.edge_count() == 2);
  CHECK(lg.graph.has_edge(0, 1));
  CHECK(lg.graph.has_edge(1, 2));
  CHECK_FALSE(lg.graph.has_edge(0, 2));
  CHECK_FALSE(lg.graph.weighted());
}

TEST_CASE("duplicate edges collapse with summed weights") {
  auto lg = load_graph_string("0 1\n0 1\n");
  CHECK(lg.graph.edge_count() == 1);
  CHECK(lg.graph.edge_weight(0, 1) == doctest::Approx(2.0));
  CHECK(lg.graph.weighted());
}

TEST_CASE("labels are remapped densely in appearance order") {
  auto lg = load_graph_string("a b\n");
  CHECK(lg.graph.node_count() == 2);
  CHECK(lg.graph.has_edge(0, 1));
  REQUIRE(lg.ids.labels.size() == 2);
  CHECK(lg.ids.labels[0] == "a");
  CHECK(lg.ids.labels[1] == "b");
  // round trip through the canonical writer
  auto rt = load_graph_string(write_graph_string(lg.graph));
  CHECK(rt.graph.edges().size() == lg.graph.edges().size());
  CHECK(rt.graph.has_edge(0, 1));
}

TEST_CASE("graph load errors") {
  CHECK_THROWS_AS(load_graph_string("3 3\n"), ParseError);           // self-loop
  CHECK_THROWS_AS(load_graph_string("0 1 x\n"), ParseError);         // bad weight
  CHECK_THROWS_AS(load_graph_string("0 1 -2\n"), ValueError);        // negative weight
  CHECK_THROWS_AS(load_graph_string("0 1 0\n"), ValueError);         // zero weight
  CHECK_THROWS_AS(load_graph_string("0\n"), ParseError);             // missing endpoint
  CHECK_THROWS_AS(load_graph_string("0 1\n1 0\n"), ParseError);      // reversed duplicate
  CHECK_NOTHROW(load_graph_string("0 1\n1 0\n", /*symmetrize=*/true));
  auto sym = load_graph_string("0 1 2\n1 0 3\n", true);
  CHECK(sym.graph.edge_weight(0, 1) == doctest::Approx(5.0));
}

TEST_CASE("comments and node-count header") {
  auto lg = load_graph_string("# nodes 5\n# a comment\n0 1\n3 4\n");
  CHECK(lg.graph.node_count() == 5);
  CHECK(lg.graph.degree(2) == 0);
  // header pins integer ids
  CHECK_THROWS_AS(load_graph_string("# nodes 2\na b\n"), ParseError);
  CHECK_THROWS_AS(load_graph_string("# nodes 2\n1 2\n"), ParseError);
}

TEST_CASE("canonical serialization is idempotent") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    int n = static_cast<int>(rng.uniform_int(2, 30));
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (rng.bernoulli(0.2)) edges.push_back({u, v, rng.bernoulli(0.5) ? 1.0 : rng.uniform01() + 0.5});
    Graph g(n, edges, true);
    std::string s1 = write_graph_string(g);
    auto lg = load_graph_string(s1);
    std::string s2 = write_graph_string(lg.graph);
    CHECK(s1 == s2);
    CHECK(graph_digest(g) == graph_digest(lg.graph));
  }
}

TEST_CASE("load_cover basics") {
  Cover c = load_cover_string("0 1\n2 3\n", 4);
  CHECK(c.community_count() == 2);
  CHECK(c.is_partition());

  Cover c2 = load_cover_string("0 1\n", 3);
  CHECK(c2.community_count() == 2);  // {2} appended as singleton
  CHECK(c2.is_partition());
  CHECK(c2 == Cover(3, {{0, 1}, {2}}));

  Cover c3 = load_cover_string("0 1 2\n1 2 3\n", 4);
  CHECK_FALSE(c3.is_partition());
  auto s = c3.membership_counts();
  CHECK(s[1] == 2);
  CHECK(s[2] == 2);
  CHECK(s[0] == 1);

  CHECK_THROWS_AS(load_cover_string("0 7\n", 4), ValueError);
  // empty file on a non-empty graph: all singletons, not an error
  Cover c4 = load_cover_string("", 3);
  CHECK(c4 == Cover::singletons(3));
}

TEST_CASE("write_cover canonical ordering") {
  Cover c(3, {{2}, {1, 0}});
  CHECK(write_cover_string(c) == "0 1\n2\n");
}

TEST_CASE("cover round trip on random covers") {
  Rng rng(1234);
  for (int trial = 0; trial < 50; ++trial) {
    int n = static_cast<int>(rng.uniform_int(1, 40));
    int k = static_cast<int>(rng.uniform_int(1, 6));
    std::vector<std::vector<int>> comms(static_cast<std::size_t>(k));
    for (int v = 0; v < n; ++v) {
      int memberships = static_cast<int>(rng.uniform_int(1, 2));
      for (int m = 0; m < memberships; ++m)
        comms[static_cast<std::size_t>(rng.uniform_int(0, k - 1))].push_back(v);
    }
    std::erase_if(comms, [](const auto& c) { return c.empty(); });
    Cover c = Cover::with_singleton_completion(n, comms);
    Cover rt = load_cover_string(write_cover_string(c), n);
    CHECK(rt == c);
    // sum of membership counts equals sum of community sizes
    auto s = c.membership_counts();
    long long lhs = std::accumulate(s.begin(), s.end(), 0LL);
    long long rhs = 0;
    for (const auto& comm : c.communities()) rhs += static_cast<long long>(comm.size());
    CHECK(lhs == rhs);
  }
}

TEST_CASE("cover validation errors") {
  CHECK_THROWS_AS(Cover(3, {{0, 1}}), ValueError);       // node 2 uncovered
  CHECK_THROWS_AS(Cover(2, {{0, 1}, {}}), ValueError);   // empty community
  CHECK_THROWS_AS(Cover(2, {{0, 5}}), ValueError);       // out of range
  // duplicate ids within a community collapse
  Cover c(2, {{0, 0}, {1}});
  CHECK(c.communities()[0] == std::vector<int>{0});
}

TEST_CASE("id map round trip") {
  auto lg = load_graph_string("alpha beta\nbeta gamma\n");
  std::ostringstream out;
  write_id_map(lg.ids, out);
  std::istringstream in(out.str());
  IdMap back = load_id_map(in);
  CHECK(back.labels == lg.ids.labels);
  CHECK_FALSE(lg.ids.trivial());
  CHECK(load_graph_string("0 1\n").ids.trivial());
}
