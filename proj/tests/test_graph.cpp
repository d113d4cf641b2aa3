#include <gtest/gtest.h>

#include <sstream>

#include "locality/generators.hpp"
#include "locality/graph.hpp"
#include "locality/graph_io.hpp"
#include "oracles.hpp"

using namespace locality;

namespace {

void expect_canonical(const LabeledGraph& g) {
  for (Vertex v = 0; v < g.order(); ++v) {
    auto nb = g.neighbors(v);
    EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
    EXPECT_LE(nb.size(), g.delta());
    for (Vertex w : nb) {
      EXPECT_NE(w, v);
      EXPECT_TRUE(g.has_edge(w, v));
    }
  }
}

}  // namespace

TEST(Graph, RejectsMalformedEdges) {
  EXPECT_THROW(LabeledGraph(3, 2, {{0, 0}}), InvalidArgument);
  EXPECT_THROW(LabeledGraph(3, 2, {{0, 1}, {1, 0}}), InvalidArgument);
  EXPECT_THROW(LabeledGraph(3, 2, {{0, 3}}), InvalidArgument);
  EXPECT_THROW(LabeledGraph(4, 1, {{0, 1}, {0, 2}}), InvalidArgument);
}

TEST(Graph, Triangle) {
  auto g = generate("cycle:3");
  EXPECT_EQ(g.order(), 3u);
  for (Vertex v = 0; v < 3; ++v) EXPECT_EQ(g.degree(v), 2u);
  EXPECT_EQ(girth(g), 3u);
}

TEST(Graph, DoubleCoverOfOddCycleIsOneLongCycle) {
  auto g = generate("double-cover(cycle:3)");
  EXPECT_EQ(g.order(), 6u);
  EXPECT_EQ(connected_components(g).size(), 1u);
  for (Vertex v = 0; v < 6; ++v) EXPECT_EQ(g.degree(v), 2u);
  EXPECT_EQ(girth(g), 6u);
}

TEST(Graph, TwoPathOnSixVertices) {
  auto g = generate("two-path:6");
  std::vector<std::uint64_t> deg;
  for (Vertex v = 0; v < 6; ++v) deg.push_back(g.degree(v));
  std::sort(deg.begin(), deg.end());
  EXPECT_EQ(deg, (std::vector<std::uint64_t>{1, 1, 1, 1, 2, 2}));
  EXPECT_THROW(generate("two-path:5"), InvalidArgument);
}

TEST(Graph, TwoPathSeededPlacementLeavesRestIsolated) {
  auto g = generate("two-path:20:9");
  std::uint64_t isolated = 0, middles = 0;
  for (Vertex v = 0; v < 20; ++v) {
    isolated += g.degree(v) == 0;
    middles += g.degree(v) == 2;
  }
  EXPECT_EQ(isolated, 14u);
  EXPECT_EQ(middles, 2u);
  EXPECT_EQ(g.edge_count(), 4u);
}

TEST(Graph, RandomRegularHandshake) {
  auto g = generate("random-regular:10:3:7");
  EXPECT_EQ(g.edge_count(), 15u);
  for (Vertex v = 0; v < 10; ++v) EXPECT_EQ(g.degree(v), 3u);
  EXPECT_THROW(generate("random-regular:5:3:1"), InvalidArgument);
}

TEST(Graph, GirthExamples) {
  EXPECT_EQ(girth(cycle_graph(5)), 5u);
  EXPECT_FALSE(girth(path_graph(4)).has_value());
  EXPECT_EQ(girth(double_cover(cycle_graph(4))), 4u);
}

TEST(Graph, GirthMatchesEdgeRemovalOracle) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto g = random_regular_graph(12, 3, seed);
    EXPECT_EQ(girth(g), oracle::girth_by_edge_removal(g)) << "seed " << seed;
  }
  EXPECT_EQ(girth(generate("union(cycle:7,cycle:4)")), oracle::girth_by_edge_removal(generate("union(cycle:7,cycle:4)")));
}

TEST(Graph, HighGirthSampler) {
  auto s = sample_high_girth_regular(14, 3, 5, 1);
  auto gi = girth(s.graph);
  ASSERT_TRUE(gi.has_value());
  EXPECT_GE(*gi, 5u);
  EXPECT_EQ(oracle::girth_by_edge_removal(s.graph), gi);

  EXPECT_THROW(sample_high_girth_regular(4, 3, 4, 1, 200), SamplingExhausted);

  auto c6 = sample_high_girth_regular(6, 2, 6, 3);
  EXPECT_EQ(c6.graph.edge_count(), 6u);
  EXPECT_EQ(connected_components(c6.graph).size(), 1u);
  EXPECT_EQ(girth(c6.graph), 6u);
}

TEST(Graph, CollectionProperties) {
  const char* specs[] = {"cycle:9", "path:7", "random-regular:16:3:2", "double-cover(random-regular:10:3:5)",
                         "two-copies(cycle:5)", "pad:12(cycle:4)", "union(path:3,cycle:6)",
                         "high-girth:20:3:5:4"};
  for (const char* s : specs) {
    SCOPED_TRACE(s);
    auto g = generate(s);
    expect_canonical(g);
    EXPECT_EQ(generate(s), g);
    EXPECT_EQ(GraphSpec::parse(s).to_string(), s);
  }
}

TEST(Graph, DoubleCoverAndCopiesProperties) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto g = random_regular_graph(10, 3, seed);
    auto b = double_cover(g);
    EXPECT_TRUE(is_bipartite(b));
    auto gb = girth(b);
    auto gg = girth(g);
    if (gg && gb) {
      EXPECT_GE(*gb, *gg);
    }

    auto a = two_copies(g);
    for (std::uint64_t copy = 0; copy < 2; ++copy) {
      std::vector<Vertex> ids(10);
      for (Vertex v = 0; v < 10; ++v) ids[v] = v + copy * 10;
      auto [sub, orig] = induced_subgraph(a, ids);
      EXPECT_EQ(sub, g);
    }
  }
}

TEST(Graph, RelabelMovesEdges) {
  auto g = path_graph(3);  // 0-1-2
  std::vector<Vertex> perm{2, 0, 1};
  auto h = g.relabel(perm);
  EXPECT_TRUE(h.has_edge(2, 0));
  EXPECT_TRUE(h.has_edge(0, 1));
  EXPECT_FALSE(h.has_edge(2, 1));
}

TEST(GraphIo, RoundTrip) {
  auto g = generate("random-regular:12:3:4");
  auto text = graph_to_string(g);
  EXPECT_EQ(text.rfind("n 12 delta 3\n", 0), 0u);
  EXPECT_EQ(graph_from_string(text), g);
}

TEST(GraphIo, RejectsViolations) {
  EXPECT_THROW(graph_from_string("n 3 delta 2\n1 0\n"), ParseError);
  EXPECT_THROW(graph_from_string("n 3 delta 2\n0 2\n0 1\n"), ParseError);
  EXPECT_THROW(graph_from_string("n 3 delta 2\n0 1\n0 1\n"), ParseError);
  EXPECT_THROW(graph_from_string("nodes 3 delta 2\n"), ParseError);
  EXPECT_THROW(graph_from_string("n 3 delta 2\n0 1 2\n"), ParseError);
  EXPECT_THROW(graph_from_string("n 3 delta 2\n-1 1\n"), ParseError);
  EXPECT_THROW(graph_from_string("n 3 delta 1\n0 1\n1 2\n"), ParseError);
}

TEST(GraphSpec, RejectsGarbage) {
  EXPECT_THROW(GraphSpec::parse("cycle"), ParseError);
  EXPECT_THROW(GraphSpec::parse("wheel:5"), ParseError);
  EXPECT_THROW(GraphSpec::parse("cycle:5x"), ParseError);
}
