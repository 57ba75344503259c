#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "botimpact/error.hpp"
#include "botimpact/graph.hpp"
#include "botimpact/io.hpp"
#include "test_util.hpp"

using namespace botimpact;
using botimpact::testing::random_graph;

namespace {

DirectedWeightedGraph triangle() {
  DirectedWeightedGraph::Builder b;
  b.add_interaction("a", "b");
  b.add_interaction("b", "c");
  b.add_interaction("c", "a");
  return std::move(b).build();
}

std::set<std::tuple<std::string, std::string, double>> named_edges(const DirectedWeightedGraph& g) {
  std::set<std::tuple<std::string, std::string, double>> out;
  for (const auto& e : g.edges()) out.emplace(g.name(e.source), g.name(e.target), e.weight);
  return out;
}

}  // namespace

TEST(Graph, RepeatedInteractionAccumulates) {
  DirectedWeightedGraph::Builder b;
  b.add_interaction("a", "b", 1);
  b.add_interaction("a", "b", 1);
  const auto g = std::move(b).build();
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(g.weight(g.at("a"), g.at("b")), 2.0);
}

TEST(Graph, SelfLoopRejected) {
  DirectedWeightedGraph::Builder b;
  EXPECT_THROW(b.add_interaction("a", "a", 1), InvalidArgument);
}

TEST(Graph, BadWeightsRejected) {
  DirectedWeightedGraph::Builder b;
  EXPECT_THROW(b.add_interaction("a", "b", 0), InvalidArgument);
  EXPECT_THROW(b.add_interaction("a", "b", -1), InvalidArgument);
  EXPECT_THROW(b.add_interaction("a", "b", std::nan("")), InvalidArgument);
}

TEST(Graph, DirectionPreserved) {
  DirectedWeightedGraph::Builder b;
  b.add_interaction("a", "b", 3);
  b.add_interaction("b", "a", 1);
  const auto g = std::move(b).build();
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.weight(g.at("a"), g.at("b")), 3.0);
  EXPECT_EQ(g.weight(g.at("b"), g.at("a")), 1.0);
}

TEST(Graph, NameMappingIsBijective) {
  const auto g = triangle();
  for (NodeId u = 0; u < g.node_count(); ++u) EXPECT_EQ(g.at(g.name(u)), u);
  EXPECT_FALSE(g.find("zzz").has_value());
  EXPECT_THROW(g.at("zzz"), InvalidArgument);
}

TEST(Graph, InducedSubgraphFiltersEdges) {
  const auto g = triangle();
  const std::vector<NodeId> keep = {g.at("a"), g.at("b")};
  const auto sub = g.induced_subgraph(keep);
  EXPECT_EQ(sub.node_count(), 2u);
  ASSERT_EQ(sub.edge_count(), 1u);
  EXPECT_EQ(named_edges(sub), (decltype(named_edges(sub)){{"a", "b", 1.0}}));
}

TEST(Graph, InducedSubgraphIdentityAndEmpty) {
  const auto g = triangle();
  std::vector<NodeId> all(g.node_count());
  std::iota(all.begin(), all.end(), 0);
  const auto same = g.induced_subgraph(all);
  EXPECT_EQ(same.names(), g.names());
  EXPECT_EQ(named_edges(same), named_edges(g));
  const auto empty = g.induced_subgraph(std::vector<NodeId>{});
  EXPECT_EQ(empty.node_count(), 0u);
  EXPECT_EQ(empty.edge_count(), 0u);
}

TEST(Graph, InducedSubgraphRejectsUnknownNode) {
  const auto g = triangle();
  const std::vector<NodeId> keep = {0, 7};
  EXPECT_THROW(g.induced_subgraph(keep), InvalidArgument);
}

TEST(Graph, FollowingOfIsInNeighbors) {
  DirectedWeightedGraph::Builder b;
  b.add_interaction("h", "s1");
  b.add_interaction("h", "s2");
  b.add_node("lonely");
  const auto g = std::move(b).build();
  const auto f = g.following_of(g.at("s1"));
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].node, g.at("h"));
  EXPECT_TRUE(g.following_of(g.at("lonely")).empty());
  EXPECT_TRUE(g.following_of(g.at("h")).empty());
  EXPECT_THROW(g.following_of(99), InvalidArgument);
}

TEST(GraphProperty, InducedSubgraphComposes) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 100;
    const auto g = random_graph(rng, n, 0.05);
    std::vector<bool> k1(n), k2(n);
    for (std::size_t i = 0; i < n; ++i) {
      k1[i] = rng() % 3 != 0;
      k2[i] = rng() % 3 != 0;
    }
    std::vector<bool> both(n);
    for (std::size_t i = 0; i < n; ++i) both[i] = k1[i] && k2[i];
    const auto direct = g.induced_subgraph(both);

    const auto first = g.induced_subgraph(k1);
    std::vector<bool> k2_in_first(first.node_count());
    for (NodeId u = 0; u < first.node_count(); ++u) k2_in_first[u] = k2[g.at(first.name(u))];
    const auto composed = first.induced_subgraph(k2_in_first);

    EXPECT_EQ(direct.names(), composed.names());
    EXPECT_EQ(named_edges(direct), named_edges(composed));
  }
}

TEST(GraphProperty, FollowingAndFollowersAreTransposes) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_graph(rng, 60, 0.08);
    std::set<std::pair<NodeId, NodeId>> in_pairs, out_pairs;
    for (NodeId i = 0; i < g.node_count(); ++i) {
      for (const auto& nb : g.following_of(i)) in_pairs.emplace(nb.node, i);
      for (const auto& nb : g.followers_of(i)) out_pairs.emplace(i, nb.node);
    }
    EXPECT_EQ(in_pairs, out_pairs);
  }
}

TEST(GraphProperty, TotalWeightInvariantUnderRelabeling) {
  std::mt19937_64 rng(13);
  const auto g = random_graph(rng, 80, 0.05);
  std::vector<std::size_t> perm(g.node_count());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  DirectedWeightedGraph::Builder b;
  for (std::size_t i = 0; i < perm.size(); ++i) b.add_node(fmt::format("x{}", perm[i]));
  for (const auto& e : g.edges()) {
    b.add_interaction(fmt::format("x{}", perm[e.source]), fmt::format("x{}", perm[e.target]),
                      e.weight);
  }
  const auto relabeled = std::move(b).build();
  EXPECT_EQ(relabeled.total_weight(), g.total_weight());
  EXPECT_EQ(relabeled.edge_count(), g.edge_count());
}

TEST(EdgeList, RoundTripKeepsIsolatedNodes) {
  botimpact::testing::TempDir dir;
  DirectedWeightedGraph::Builder b;
  b.add_interaction("a", "b", 2.5);
  b.add_node("solo");
  const auto g = std::move(b).build();
  write_edge_list(g, dir / "g.tsv");
  const auto back = read_edge_list(dir / "g.tsv");
  EXPECT_EQ(back.node_count(), 3u);
  EXPECT_EQ(named_edges(back), named_edges(g));
}

TEST(EdgeList, SkipsSelfLoopsAndMalformedLinesWithLineNumbers) {
  botimpact::testing::TempDir dir;
  botimpact::testing::write_text(dir / "g.tsv", "a\tb\na\ta\nbroken\nb\tc\t2\nc\td\tx\n");
  EdgeListReport report;
  const auto g = read_edge_list(dir / "g.tsv", &report);
  EXPECT_EQ(report.edges, 2u);
  EXPECT_EQ(report.skipped, 3u);
  ASSERT_FALSE(report.diagnostics.empty());
  EXPECT_NE(report.diagnostics[0].find(":2:"), std::string::npos);
  EXPECT_EQ(g.weight(g.at("b"), g.at("c")), 2.0);
}
