#include <gtest/gtest.h>

#include <cmath>

#include "distreg/error.hpp"
#include "distreg/network.hpp"

using namespace distreg;

namespace {

// 0-1-2 plus the detour 0-3-4-2.
Graph detour_graph() { return Graph::from_edges(5, {{0, 1}, {1, 2}, {0, 3}, {3, 4}, {4, 2}}); }

}  // namespace

TEST(Graph, Construction) {
  EXPECT_THROW(Graph(0), InvalidArgument);
  EXPECT_THROW(Graph::from_edges(3, {{0, 0}}), InvalidArgument);
  EXPECT_THROW(Graph::from_edges(3, {{0, 1}, {1, 0}}), InvalidArgument);
  EXPECT_THROW(Graph::from_edges(3, {{0, 3}}), InvalidArgument);
  EXPECT_THROW(Graph::from_adjacency(2, {0, 1, 0, 0}), InvalidArgument);
  EXPECT_THROW(Graph::from_adjacency(2, {1, 0, 0, 0}), InvalidArgument);
  EXPECT_THROW(Graph::from_adjacency(2, {0, 2, 2, 0}), InvalidArgument);
  const Graph g = detour_graph();
  EXPECT_EQ(g.edge_count(), 5u);
  EXPECT_TRUE(g.has_edge(2, 4));
  EXPECT_EQ(g, Graph::from_adjacency(5, [&] {
              std::vector<std::uint8_t> a(25, 0);
              for (auto [u, v] : g.edges()) {
                a[u * 5 + v] = a[v * 5 + u] = 1;
              }
              return a;
            }()));
}

TEST(Bfs, Distances) {
  const Graph g = detour_graph();
  EXPECT_EQ(bfs_distance(g, 0), (std::vector<int>{0, 1, 2, 1, 2}));
  const Graph split = Graph::from_edges(4, {{0, 1}, {2, 3}});
  const auto d = bfs_distance(split, 0);
  EXPECT_EQ(d[1], 1);
  EXPECT_EQ(d[2], kUnreachable);
  EXPECT_THROW(bfs_distance(split, 4), InvalidArgument);
}

TEST(DisruptedAdjacency, RemovesIncidentEdges) {
  const Graph a = disrupted_adjacency(detour_graph(), {1});
  EXPECT_EQ(a.edge_count(), 3u);
  EXPECT_FALSE(a.has_edge(0, 1));
  EXPECT_EQ(bfs_distance(a, 0)[2], 3);
}

TEST(DetourScore, DetourExample) {
  const Graph g = detour_graph();
  const Graph a = disrupted_adjacency(g, {1});
  EXPECT_NEAR(detour_score(g, a, 0, 2), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(detour_score(g, a, 0, 2, DetourConvention::reversed), -0.5, 1e-15);
  EXPECT_FALSE(feasible(0, 2, g, a, 0.25));
  EXPECT_TRUE(feasible(0, 2, g, a, 0.4));
  EXPECT_EQ(detour_score(g, g, 0, 2), 0.0);
}

TEST(DetourScore, Disconnected) {
  EXPECT_EQ(detour_score_from_distances(2, kUnreachable), 1.0);
  EXPECT_EQ(detour_score_from_distances(2, kUnreachable, DetourConvention::reversed),
            -std::numeric_limits<double>::infinity());
  EXPECT_EQ(detour_score_from_distances(0, 0), 0.0);
  const Graph g = Graph::from_edges(3, {{0, 1}, {1, 2}});
  const Graph a = disrupted_adjacency(g, {1});
  EXPECT_FALSE(feasible(0, 2, g, a, 0.25));
  // Under the reversed orientation every score is <= 0, so any xi >= 0 admits all.
  EXPECT_TRUE(feasible(0, 2, g, a, 0.25, DetourConvention::reversed));
}

TEST(DetourScore, NaturalGraphDisconnectedThrows) {
  const Graph g = Graph::from_edges(4, {{0, 1}, {2, 3}});
  EXPECT_THROW(detour_score(g, g, 0, 3), InvalidArgument);
  EXPECT_THROW(detour_score(g, g, 1, 1), InvalidArgument);
}

TEST(DetourConvention, Parse) {
  EXPECT_EQ(parse_detour_convention("reversed"), DetourConvention::reversed);
  EXPECT_EQ(to_string(DetourConvention::inverted), "inverted");
  EXPECT_THROW(parse_detour_convention("sideways"), InvalidArgument);
}
