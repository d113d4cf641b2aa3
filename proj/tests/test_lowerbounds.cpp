#include <gtest/gtest.h>

#include <cmath>

#include "locality/generators.hpp"
#include "locality/lowerbounds.hpp"
#include "oracles.hpp"

using namespace locality;

namespace {

bool is_single_cycle(const LabeledGraph& g) {
  for (Vertex v = 0; v < g.order(); ++v) {
    if (g.neighbors(v).size() != 2) return false;
  }
  return connected_components(g).size() == 1;
}

}  // namespace

TEST(BuildPair, Triangle) {
  auto p = build_pair(cycle_graph(3));
  EXPECT_EQ(p.n, 3u);
  EXPECT_EQ(p.a.order(), 6u);
  auto comps = connected_components(p.a);
  ASSERT_EQ(comps.size(), 2u);
  EXPECT_EQ(comps[0], (std::vector<Vertex>{0, 1, 2}));
  EXPECT_EQ(girth(p.a), 3u);
  EXPECT_TRUE(is_single_cycle(p.b));
  EXPECT_TRUE(is_bipartite(p.b));
}

TEST(BuildPair, BipartiteBase) {
  auto p = build_pair(cycle_graph(4));
  for (const auto* g : {&p.a, &p.b}) {
    auto comps = connected_components(*g);
    ASSERT_EQ(comps.size(), 2u);
    for (const auto& c : comps) {
      auto [sub, ids] = induced_subgraph(*g, c);
      EXPECT_TRUE(is_single_cycle(sub));
      EXPECT_EQ(sub.order(), 4u);
    }
  }
}

TEST(BuildPair, CoverEdges) {
  auto g = random_regular_graph(10, 3, 1);
  auto p = build_pair(g);
  EXPECT_EQ(p.a.edge_count(), 2 * g.edge_count());
  EXPECT_EQ(p.b.edge_count(), 2 * g.edge_count());
  for (const auto& [u, v] : g.edges()) {
    EXPECT_TRUE(p.b.has_edge(u, v + 10));
    EXPECT_TRUE(p.b.has_edge(v, u + 10));
    EXPECT_FALSE(p.b.has_edge(u, v));
  }
}

TEST(BuildPair, CoverIndependenceNumber) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto g = random_regular_graph(8, 3, seed);
    EXPECT_EQ(oracle::independence_number(build_pair(g).b), 8u);
  }
  // Only at least n when g is not regular.
  EXPECT_EQ(oracle::independence_number(build_pair(path_graph(3)).b), 4u);
}

TEST(Perturbation, Bijections) {
  PerturbationSpace space(5);
  for (std::uint64_t mask = 0; mask < 32; ++mask) {
    auto ids = space.assignment(mask);
    std::vector<Vertex> sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    for (Vertex i = 0; i < 10; ++i) EXPECT_EQ(sorted[i], i);
    for (Vertex v = 0; v < 5; ++v) EXPECT_EQ(ids[v] == v + 5, (mask >> v & 1) == 1);
  }
}

TEST(TranscriptDistribution, ZeroProbeIsPointMass) {
  auto p = build_pair(cycle_graph(5));
  auto d = transcript_distribution(make_tree("constant", 0), p.a, 3, 0, DistributionMode::exact);
  ASSERT_EQ(d.counts.size(), 1u);
  EXPECT_EQ(d.counts.begin()->first, "=0");
  EXPECT_EQ(d.counts.begin()->second, 32u);
}

TEST(TranscriptDistribution, ProbeSelfOnTwoTriangles) {
  // Identifier 0 sits in one of the triangles; each of its two copy-mates
  // independently carries the low or the high identifier of its pair.
  auto p = build_pair(cycle_graph(3));
  auto d = transcript_distribution(make_tree("probe-self", 1), p.a, 0, 1, DistributionMode::exact);
  std::map<std::string, std::uint64_t> expected{
      {"0:1,2;=0", 2}, {"0:1,5;=0", 2}, {"0:2,4;=0", 2}, {"0:4,5;=0", 2}};
  EXPECT_EQ(d.counts, expected);
  EXPECT_EQ(d.total, 8u);
}

TEST(TranscriptDistribution, SampledAgreesWithExact) {
  auto p = build_pair(cycle_graph(8));
  auto tree = make_tree("bfs", 2);
  auto exact = transcript_distributions(tree, p.a, 2, DistributionMode::exact);
  auto sampled = transcript_distributions(tree, p.a, 2, DistributionMode::sampled, {100000, 4});
  for (Vertex v = 0; v < 16; ++v) {
    for (const auto& [key, count] : exact[v].counts) {
      const double q = static_cast<double>(count) / 256.0;
      const double sigma = std::sqrt(q * (1 - q) / 1e5);
      EXPECT_NEAR(sampled[v].probability(key), q, 4 * sigma + 1e-12) << v << " " << key;
    }
    for (const auto& [key, count] : sampled[v].counts) EXPECT_GT(exact[v].counts.count(key), 0u) << key;
  }
}

TEST(TranscriptDistribution, ScaleGuard) {
  auto p = build_pair(cycle_graph(13));
  EXPECT_THROW(transcript_distributions(make_tree("constant", 0), p.a, 0, DistributionMode::exact), ScaleGuard);
  EXPECT_THROW(transcript_distributions(make_tree("constant", 0), cycle_graph(5), 0, DistributionMode::exact),
               InvalidArgument);
}

TEST(Indistinguishability, BelowHalfGirth) {
  struct Case {
    LabeledGraph g;
    std::uint64_t t;
  };
  std::vector<Case> cases{{cycle_graph(9), 2}, {cycle_graph(9), 4}, {cycle_graph(5), 2}, {cycle_graph(11), 5}};
  for (const auto& c : cases) {
    for (const auto& id : tree_ids()) {
      auto r = indistinguishability_check(c.g, make_tree(id, c.t), c.t);
      EXPECT_TRUE(r.all_equal) << id << " n=" << c.g.order() << " t=" << c.t;
      EXPECT_EQ(r.queries.size(), 2 * c.g.order());
    }
  }
}

TEST(Indistinguishability, HighGirthRegular) {
  auto s = sample_high_girth_regular(10, 3, 5, 3);
  const std::uint64_t t = (*girth(s.graph) - 1) / 2;
  for (const auto& id : tree_ids()) {
    EXPECT_TRUE(indistinguishability_check(s.graph, make_tree(id, t), t).all_equal) << id;
  }
}

TEST(Indistinguishability, TriangleWalkDistinguishes) {
  auto r = indistinguishability_check(cycle_graph(3), make_tree("triangle-walk", 3), 3);
  EXPECT_FALSE(r.all_equal);
  EXPECT_EQ(r.girth, 3u);
  for (const auto& q : r.queries) {
    ASSERT_FALSE(q.equal);
    ASSERT_TRUE(q.witness);
    EXPECT_NE(q.witness->count_a, q.witness->count_b);
  }
  // Every walk closes on two triangles and never on C6.
  auto p = build_pair(cycle_graph(3));
  auto tree = make_tree("triangle-walk", 3);
  EXPECT_EQ(expected_ones_numerator(tree, p.a, 3), 6u * 8u);
  EXPECT_EQ(expected_ones_numerator(tree, p.b, 3), 0u);
}

TEST(Indistinguishability, ZeroProbesAlwaysEqual) {
  for (std::uint64_t n : {3u, 4u, 7u}) {
    EXPECT_TRUE(indistinguishability_check(cycle_graph(n), make_tree("constant", 0), 0).all_equal);
  }
}

TEST(ExpectationTransfer, EqualOnesBelowHalfGirth) {
  auto g = cycle_graph(9);
  auto p = build_pair(g);
  for (const auto& id : tree_ids()) {
    auto tree = make_tree(id, 2);
    EXPECT_EQ(expected_ones_numerator(tree, p.a, 2), expected_ones_numerator(tree, p.b, 2)) << id;
  }
  // bfs answers form an independent set, so its mean output on B_G is capped
  // by alpha(A_G) = 8 < alpha(B_G) = 9.
  auto bfs = make_tree("bfs", 2);
  EXPECT_LE(expected_ones_numerator(bfs, p.b, 2), 8u * 512u);
}

TEST(GapReport, NineCycle) {
  auto r = gap_report(cycle_graph(9));
  EXPECT_EQ(r.alpha_a, 8u);
  EXPECT_EQ(r.alpha_b, 9u);
  EXPECT_EQ(r.maxcut_a, 16u);
  EXPECT_EQ(r.maxcut_b, 18u);
  EXPECT_DOUBLE_EQ(r.cut_fraction_a, 8.0 / 9.0);
  EXPECT_DOUBLE_EQ(r.cut_fraction_b, 1.0);
  EXPECT_DOUBLE_EQ(r.implied_color_bound, 18.0 / 8.0);
}

TEST(GapReport, Triangle) {
  auto r = gap_report(cycle_graph(3));
  EXPECT_EQ(r.alpha_a, 2u);
  EXPECT_EQ(r.alpha_b, 3u);
}

TEST(GapReport, BipartiteBaseHasNoGap) {
  for (const auto& g : {cycle_graph(4), cycle_graph(10), path_graph(7)}) {
    auto r = gap_report(g);
    EXPECT_EQ(r.alpha_a, r.alpha_b);
    EXPECT_EQ(r.maxcut_a, r.maxcut_b);
    EXPECT_EQ(r.maxcut_a, r.edges);
  }
}

TEST(GapReport, CoverCutIsPerfect) {
  std::vector<LabeledGraph> gs{cycle_graph(5), cycle_graph(11)};
  for (std::uint64_t seed = 0; seed < 4; ++seed) gs.push_back(random_regular_graph(10, 3, seed));
  for (const auto& g : gs) {
    if (is_bipartite(g) || connected_components(g).size() != 1) continue;
    auto r = gap_report(g);
    EXPECT_EQ(r.maxcut_b, r.edges);
    EXPECT_LT(r.maxcut_a, r.edges);
    EXPECT_EQ(r.alpha_a, oracle::independence_number(build_pair(g).a));
  }
  EXPECT_THROW(gap_report(cycle_graph(13)), ScaleGuard);
}
