#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <limits>

#include "saev/graph.hpp"
#include "saev/rng.hpp"

using namespace saev;

namespace {

// Floyd-Warshall on integer ticks, the independent all-pairs oracle.
std::vector<std::vector<std::int64_t>> floyd_warshall(const RoadGraph& g) {
  const std::size_t n = g.vertex_count();
  const std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::vector<std::int64_t>> d(n, std::vector<std::int64_t>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const Link& l : g.links()) {
    std::size_t u = g.index_of(l.from), v = g.index_of(l.to);
    d[u][v] = std::min(d[u][v], l.travel_time.ticks());
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

RoadGraph random_graph(Rng& rng, int n, double edge_prob) {
  RoadGraph g;
  for (int v = 0; v < n; ++v) g.add_vertex(v);
  // a random ring keeps everything reachable, extra chords add variety
  for (int v = 0; v < n; ++v)
    g.add_link(v, (v + 1) % n, rng.uniform(0.5, 20.0), rng.uniform(0.1, 5.0));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && rng.bernoulli(edge_prob))
        g.add_link(a, b, rng.uniform(0.5, 20.0), rng.uniform(0.1, 5.0));
  return g;
}

}  // namespace

TEST_CASE("shortest paths match the all-pairs oracle on random graphs") {
  Rng rng(20240917);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + static_cast<int>(rng.uniform_index(49));
    RoadGraph g = random_graph(rng, n, 0.15);
    auto oracle = floyd_warshall(g);
    for (std::size_t s = 0; s < g.vertex_count(); ++s) {
      ShortestPathTree tree = sssp_tree(g, g.vertices()[s]);
      for (std::size_t t = 0; t < g.vertex_count(); ++t) {
        REQUIRE(tree.reachable(t));
        REQUIRE(tree.time_ticks[t] == oracle[s][t]);
      }
    }
  }
}

TEST_CASE("unreachable vertices are marked, not defaulted") {
  RoadGraph g;
  g.add_vertex(1);
  g.add_vertex(2);
  g.add_vertex(3);
  g.add_link(1, 2, 5.0, 1.0);  // nothing reaches 3
  ShortestPathTree tree = sssp_tree(g, 1);
  REQUIRE(tree.reachable(g.index_of(2)));
  REQUIRE_FALSE(tree.reachable(g.index_of(3)));
  auto times = sssp(g, 1);
  REQUIRE(times.count(2) == 1);
  REQUIRE(times.count(3) == 0);
  REQUIRE(times.at(2) == SimDuration::from_minutes(5.0));
}

TEST_CASE("direction matters on directed links") {
  RoadGraph g;
  g.add_vertex(1);
  g.add_vertex(2);
  g.add_link(1, 2, 5.0, 1.0);
  REQUIRE(sssp(g, 2).count(1) == 0);
}

TEST_CASE("tree paths reconstruct the time-optimal route") {
  RoadGraph g;
  for (VertexId v = 1; v <= 4; ++v) g.add_vertex(v);
  g.add_link(1, 2, 1.0, 1.0);
  g.add_link(2, 3, 1.0, 1.0);
  g.add_link(1, 3, 5.0, 0.5);  // shorter in km, slower in time
  g.add_link(3, 4, 1.0, 1.0);
  ShortestPathTree tree = sssp_tree(g, 1);
  REQUIRE(tree_path(g, tree, 4) == std::vector<VertexId>{1, 2, 3, 4});
  REQUIRE(tree.time_ticks[g.index_of(3)] == SimDuration::from_minutes(2.0).ticks());
  // km follows the time-optimal path, not the km-optimal one
  REQUIRE(tree.dist_km[g.index_of(3)] == Catch::Approx(2.0));
}

TEST_CASE("repeated runs produce identical trees") {
  Rng rng(7);
  RoadGraph g = random_graph(rng, 20, 0.2);
  ShortestPathTree t1 = sssp_tree(g, 0);
  ShortestPathTree t2 = sssp_tree(g, 0);
  REQUIRE(t1.time_ticks == t2.time_ticks);
  REQUIRE(t1.dist_km == t2.dist_km);
  REQUIRE(t1.parent_link == t2.parent_link);
}

TEST_CASE("link validation rejects bad inputs") {
  RoadGraph g;
  g.add_vertex(1);
  g.add_vertex(2);
  REQUIRE_THROWS_AS(g.add_link(1, 9, 1.0, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(g.add_link(1, 2, -1.0, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(g.add_link(1, 2, 1.0, -1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(g.add_link(1, 2, 0.0, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(sssp_tree(g, 42), std::invalid_argument);
}

TEST_CASE("graph csv loader round-trips a small network") {
  std::string path = "test_graph_edges.csv";
  {
    std::ofstream out(path);
    out << "# from_id,to_id,travel_time_min,distance_km\n";
    out << "1,2,5.5,2.0\n";
    out << "2,3,1.25,0.75\n";
  }
  RoadGraph g = load_graph_csv(path);
  REQUIRE(g.vertex_count() == 3);
  REQUIRE(g.links().size() == 2);
  REQUIRE(sssp(g, 1).at(3) == SimDuration::from_minutes(6.75));
  std::remove(path.c_str());
}
