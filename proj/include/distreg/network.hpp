#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace distreg {

using NodeId = std::uint32_t;

/// Hop count returned for unreachable nodes.
inline constexpr int kUnreachable = std::numeric_limits<int>::max();

/// Undirected simple graph on nodes 0..D-1, stored as a dense 0/1 adjacency.
class Graph {
 public:
  explicit Graph(std::size_t n_nodes);
  /// Rejects self loops, duplicate edges and out-of-range ids.
  static Graph from_edges(std::size_t n_nodes, const std::vector<std::pair<NodeId, NodeId>>& edges);
  /// Rejects asymmetric matrices, non-zero diagonals and entries other than 0/1.
  static Graph from_adjacency(std::size_t n_nodes, std::vector<std::uint8_t> adjacency);

  std::size_t size() const noexcept { return n_; }
  bool has_edge(NodeId a, NodeId b) const { return adj_[a * n_ + b] != 0; }
  const std::vector<NodeId>& neighbors(NodeId v) const { return neighbors_[v]; }
  std::vector<std::pair<NodeId, NodeId>> edges() const;
  std::size_t edge_count() const noexcept;
  void check_node(NodeId v) const;

  friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.adj_ == b.adj_; }

 private:
  void rebuild_neighbors();

  std::size_t n_;
  std::vector<std::uint8_t> adj_;
  std::vector<std::vector<NodeId>> neighbors_;
};

/// Hop counts from source; kUnreachable where no path exists.
std::vector<int> bfs_distance(const Graph& g, NodeId source);

/// Copy of g with every edge incident to a node in roi removed.
Graph disrupted_adjacency(const Graph& g, const std::vector<NodeId>& roi);

/// How the detour ratio is oriented.
///  inverted: 1 - dist_A / dist_A~ in [0, 1]; 1 when disconnected under A~.
///  reversed: 1 - dist_A~ / dist_A, <= 0; -inf when disconnected under A~.
enum class DetourConvention { inverted, reversed };

std::string to_string(DetourConvention c);
DetourConvention parse_detour_convention(const std::string& name);

/// Score from precomputed hop counts (dist_natural > 0 finite). Distance 0
/// (origin equals destination) scores 0.
double detour_score_from_distances(int dist_natural, int dist_disrupted,
                                   DetourConvention convention = DetourConvention::inverted);

/// Requires o != d and o, d connected in g.
double detour_score(const Graph& g, const Graph& g_disrupted, NodeId o, NodeId d,
                    DetourConvention convention = DetourConvention::inverted);

/// detour_score <= xi.
bool feasible(NodeId o, NodeId d, const Graph& g, const Graph& g_disrupted, double xi,
              DetourConvention convention = DetourConvention::inverted);

}  // namespace distreg
