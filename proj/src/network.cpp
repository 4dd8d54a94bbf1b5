#include "distreg/network.hpp"

#include <cmath>
#include <deque>

#include "distreg/error.hpp"

namespace distreg {

Graph::Graph(std::size_t n_nodes) : n_(n_nodes), adj_(n_nodes * n_nodes, 0), neighbors_(n_nodes) {
  if (n_nodes == 0) {
    throw InvalidArgument("graph needs at least one node");
  }
}

Graph Graph::from_edges(std::size_t n_nodes, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  Graph g(n_nodes);
  for (const auto& [u, v] : edges) {
    g.check_node(u);
    g.check_node(v);
    if (u == v) {
      throw InvalidArgument("self edge on node " + std::to_string(u));
    }
    if (g.adj_[u * n_nodes + v]) {
      throw InvalidArgument("duplicate edge " + std::to_string(u) + "-" + std::to_string(v));
    }
    g.adj_[u * n_nodes + v] = 1;
    g.adj_[v * n_nodes + u] = 1;
  }
  g.rebuild_neighbors();
  return g;
}

Graph Graph::from_adjacency(std::size_t n_nodes, std::vector<std::uint8_t> adjacency) {
  if (adjacency.size() != n_nodes * n_nodes) {
    throw InvalidArgument("adjacency must be D x D");
  }
  Graph g(n_nodes);
  for (std::size_t a = 0; a < n_nodes; ++a) {
    if (adjacency[a * n_nodes + a] != 0) {
      throw InvalidArgument("adjacency diagonal must be zero");
    }
    for (std::size_t b = 0; b < n_nodes; ++b) {
      const auto v = adjacency[a * n_nodes + b];
      if (v > 1 || v != adjacency[b * n_nodes + a]) {
        throw InvalidArgument("adjacency must be a symmetric 0/1 matrix");
      }
    }
  }
  g.adj_ = std::move(adjacency);
  g.rebuild_neighbors();
  return g;
}

void Graph::rebuild_neighbors() {
  for (std::size_t a = 0; a < n_; ++a) {
    neighbors_[a].clear();
    for (std::size_t b = 0; b < n_; ++b) {
      if (adj_[a * n_ + b]) {
        neighbors_[a].push_back(static_cast<NodeId>(b));
      }
    }
  }
}

std::vector<std::pair<NodeId, NodeId>> Graph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (std::size_t a = 0; a < n_; ++a) {
    for (NodeId b : neighbors_[a]) {
      if (a < b) {
        out.emplace_back(static_cast<NodeId>(a), b);
      }
    }
  }
  return out;
}

std::size_t Graph::edge_count() const noexcept {
  std::size_t twice = 0;
  for (const auto& nb : neighbors_) {
    twice += nb.size();
  }
  return twice / 2;
}

void Graph::check_node(NodeId v) const {
  if (v >= n_) {
    throw InvalidArgument("node id " + std::to_string(v) + " out of range [0, " +
                          std::to_string(n_) + ")");
  }
}

std::vector<int> bfs_distance(const Graph& g, NodeId source) {
  g.check_node(source);
  std::vector<int> dist(g.size(), kUnreachable);
  std::deque<NodeId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    for (NodeId w : g.neighbors(v)) {
      if (dist[w] == kUnreachable) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

Graph disrupted_adjacency(const Graph& g, const std::vector<NodeId>& roi) {
  std::vector<bool> in_roi(g.size(), false);
  for (NodeId v : roi) {
    g.check_node(v);
    in_roi[v] = true;
  }
  std::vector<std::pair<NodeId, NodeId>> kept;
  for (const auto& [a, b] : g.edges()) {
    if (!in_roi[a] && !in_roi[b]) {
      kept.emplace_back(a, b);
    }
  }
  return Graph::from_edges(g.size(), kept);
}

std::string to_string(DetourConvention c) {
  return c == DetourConvention::inverted ? "inverted" : "reversed";
}

DetourConvention parse_detour_convention(const std::string& name) {
  if (name == "inverted") {
    return DetourConvention::inverted;
  }
  if (name == "reversed") {
    return DetourConvention::reversed;
  }
  throw InvalidArgument("unknown g_convention '" + name + "' (expected inverted or reversed)");
}

double detour_score_from_distances(int dist_natural, int dist_disrupted,
                                   DetourConvention convention) {
  if (dist_natural == kUnreachable) {
    throw InvalidArgument("origin and destination are not connected in the natural graph");
  }
  if (dist_natural == 0) {
    return 0.0;
  }
  if (dist_disrupted == kUnreachable) {
    return convention == DetourConvention::inverted ? 1.0
                                                    : -std::numeric_limits<double>::infinity();
  }
  const double a = dist_natural;
  const double b = dist_disrupted;
  return convention == DetourConvention::inverted ? 1.0 - a / b : 1.0 - b / a;
}

double detour_score(const Graph& g, const Graph& g_disrupted, NodeId o, NodeId d,
                    DetourConvention convention) {
  if (g.size() != g_disrupted.size()) {
    throw InvalidArgument("natural and disrupted graphs differ in size");
  }
  g.check_node(o);
  g.check_node(d);
  if (o == d) {
    throw InvalidArgument("detour score needs distinct origin and destination");
  }
  return detour_score_from_distances(bfs_distance(g, o)[d], bfs_distance(g_disrupted, o)[d],
                                     convention);
}

bool feasible(NodeId o, NodeId d, const Graph& g, const Graph& g_disrupted, double xi,
              DetourConvention convention) {
  if (!(xi > 0.0)) {
    throw InvalidArgument("feasibility threshold xi must be positive");
  }
  return detour_score(g, g_disrupted, o, d, convention) <= xi;
}

}  // namespace distreg
