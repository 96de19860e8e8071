// graph.hpp - road network and single-source shortest paths
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "saev/csv.hpp"
#include "saev/time.hpp"

namespace saev {

using VertexId = std::int64_t;

struct Link {
  VertexId from = 0;
  VertexId to = 0;
  SimDuration travel_time;  // > 0 for distinct endpoints
  double distance_km = 0.0;
};

/// Directed road network. Vertices are intersection ids; a subset hosts
/// charging stations.
class RoadGraph {
 public:
  void add_vertex(VertexId v) {
    if (index_.count(v)) return;
    index_[v] = vertices_.size();
    vertices_.push_back(v);
    adjacency_.emplace_back();
  }

  void add_link(VertexId from, VertexId to, double travel_time_min, double distance_km) {
    if (!index_.count(from) || !index_.count(to))
      throw std::invalid_argument("link endpoint not a known vertex");
    if (!(travel_time_min >= 0.0) || !(distance_km >= 0.0) ||
        !std::isfinite(travel_time_min) || !std::isfinite(distance_km))
      throw std::invalid_argument("link weights must be finite and non-negative");
    if (from != to && travel_time_min <= 0.0)
      throw std::invalid_argument("travel time must be positive for distinct endpoints");
    Link l{from, to, SimDuration::from_minutes(travel_time_min), distance_km};
    adjacency_[index_.at(from)].push_back(links_.size());
    links_.push_back(l);
  }

  void mark_station_vertex(VertexId v) {
    if (!index_.count(v)) throw std::invalid_argument("station vertex not in graph");
    station_vertices_.insert(v);
  }

  [[nodiscard]] bool has_vertex(VertexId v) const { return index_.count(v) > 0; }
  [[nodiscard]] std::size_t vertex_count() const { return vertices_.size(); }
  [[nodiscard]] const std::vector<VertexId>& vertices() const { return vertices_; }
  [[nodiscard]] const std::vector<Link>& links() const { return links_; }
  [[nodiscard]] const std::unordered_set<VertexId>& station_vertices() const {
    return station_vertices_;
  }
  [[nodiscard]] std::size_t index_of(VertexId v) const { return index_.at(v); }

  [[nodiscard]] const std::vector<std::size_t>& out_links(VertexId v) const {
    return adjacency_[index_.at(v)];
  }

 private:
  std::vector<VertexId> vertices_;
  std::unordered_map<VertexId, std::size_t> index_;
  std::vector<Link> links_;
  std::vector<std::vector<std::size_t>> adjacency_;  // indices into links_
  std::unordered_set<VertexId> station_vertices_;
};

/// Shortest-path tree from one source: travel time, km along the time-optimal
/// path, and parent links for path reconstruction.
struct ShortestPathTree {
  VertexId source = 0;
  std::vector<std::int64_t> time_ticks;   // -1 = unreachable, indexed like graph vertices
  std::vector<double> dist_km;            // km along the chosen path
  std::vector<std::int64_t> parent_link;  // link index taken into vertex, -1 at source/unreached

  [[nodiscard]] bool reachable(std::size_t idx) const { return time_ticks[idx] >= 0; }
};

/// Label-setting SSSP with a binary heap. Exact in integer ticks.
inline ShortestPathTree sssp_tree(const RoadGraph& g, VertexId source) {
  if (!g.has_vertex(source)) throw std::invalid_argument("unknown SSSP source vertex");
  const std::size_t n = g.vertex_count();
  ShortestPathTree tree;
  tree.source = source;
  tree.time_ticks.assign(n, -1);
  tree.dist_km.assign(n, 0.0);
  tree.parent_link.assign(n, -1);

  using Item = std::pair<std::int64_t, std::size_t>;  // (ticks, vertex index)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::vector<char> done(n, 0);
  const std::size_t s = g.index_of(source);
  tree.time_ticks[s] = 0;
  heap.emplace(0, s);

  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = 1;
    for (std::size_t li : g.out_links(g.vertices()[u])) {
      const Link& l = g.links()[li];
      const std::size_t v = g.index_of(l.to);
      const std::int64_t nd = d + l.travel_time.ticks();
      if (tree.time_ticks[v] < 0 || nd < tree.time_ticks[v]) {
        tree.time_ticks[v] = nd;
        tree.dist_km[v] = tree.dist_km[u] + l.distance_km;
        tree.parent_link[v] = static_cast<std::int64_t>(li);
        heap.emplace(nd, v);
      }
    }
  }
  return tree;
}

/// Travel times from `source` keyed by vertex id; unreachable vertices absent.
inline std::unordered_map<VertexId, SimDuration> sssp(const RoadGraph& g, VertexId source) {
  ShortestPathTree tree = sssp_tree(g, source);
  std::unordered_map<VertexId, SimDuration> out;
  for (std::size_t i = 0; i < g.vertex_count(); ++i)
    if (tree.reachable(i)) out[g.vertices()[i]] = SimDuration::from_ticks(tree.time_ticks[i]);
  return out;
}

/// Vertex sequence of the tree path source -> target (empty if unreachable).
inline std::vector<VertexId> tree_path(const RoadGraph& g, const ShortestPathTree& tree,
                                       VertexId target) {
  std::size_t idx = g.index_of(target);
  if (!tree.reachable(idx)) return {};
  std::vector<VertexId> path{target};
  while (tree.parent_link[idx] >= 0) {
    const Link& l = g.links()[static_cast<std::size_t>(tree.parent_link[idx])];
    path.push_back(l.from);
    idx = g.index_of(l.from);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

/// Loads a `from_id,to_id,travel_time_min,distance_km` edge list.
inline RoadGraph load_graph_csv(const std::string& path) {
  RoadGraph g;
  auto rows = csv::read_file(path);
  for (const auto& row : rows) {
    if (row.fields.size() != 4)
      throw std::runtime_error(path + ":" + std::to_string(row.line_no) +
                               ": expected from_id,to_id,travel_time_min,distance_km");
    VertexId from = std::stoll(row.fields[0]);
    VertexId to = std::stoll(row.fields[1]);
    g.add_vertex(from);
    g.add_vertex(to);
    g.add_link(from, to, std::stod(row.fields[2]), std::stod(row.fields[3]));
  }
  return g;
}

}  // namespace saev
