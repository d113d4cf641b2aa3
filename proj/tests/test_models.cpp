#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "locality/algorithms.hpp"
#include "locality/generators.hpp"
#include "locality/models.hpp"
#include "locality/serialize.hpp"

using namespace locality;

namespace {

// Answers the parity of the smallest neighbor, remembering every probe
// answer in state. The cache never changes the answer, so it is
// query-order-oblivious.
AlgorithmHandle caching_parity() {
  AlgorithmHandle h;
  h.name = "caching-parity";
  h.model = Model::lca;
  h.max_degree = kSaturated;
  h.complexity = [](std::uint64_t) { return std::uint64_t{1}; };
  h.labels = LabelDomain::values(0, 1);
  h.state_capacity = 256;
  h.query_order_oblivious = true;
  h.rule = [](Vertex q, Prober& oracle, QueryContext& ctx) -> Label {
    auto s = ctx.state.read();
    std::vector<std::uint8_t> cache(s.begin(), s.end());
    // Layout: pairs (vertex, smallest neighbor + 1), one byte each.
    for (std::size_t i = 0; i + 1 < cache.size(); i += 2) {
      if (cache[i] == q) return cache[i + 1] == 0 ? 0 : (cache[i + 1] - 1) % 2;
    }
    auto nb = oracle.probe(q);
    std::uint8_t m = nb.empty() ? 0 : static_cast<std::uint8_t>(nb.front() + 1);
    if (cache.size() + 2 <= ctx.state.capacity()) {
      cache.push_back(static_cast<std::uint8_t>(q));
      cache.push_back(m);
      ctx.state.write(cache);
    }
    return m == 0 ? 0 : (m - 1) % 2;
  };
  return h;
}

std::vector<Vertex> all_vertices(const LabeledGraph& g) {
  std::vector<Vertex> q(g.order());
  std::iota(q.begin(), q.end(), Vertex{0});
  return q;
}

}  // namespace

TEST(CollectBall, CycleExamples) {
  auto c6 = cycle_graph(6);
  auto b1 = collect_ball(c6, 0, 1);
  EXPECT_EQ(b1.vertices, (std::vector<Vertex>{0, 1, 5}));
  EXPECT_EQ(b1.edge_count(), 2u);

  auto b0 = collect_ball(c6, 3, 0);
  EXPECT_EQ(b0.vertices, (std::vector<Vertex>{3}));
  EXPECT_EQ(b0.edge_count(), 0u);

  auto b3 = collect_ball(c6, 0, 3);
  EXPECT_EQ(b3.vertices.size(), 6u);
  EXPECT_EQ(b3.edge_count(), 6u);
}

TEST(RunLocal, Examples) {
  auto c5 = cycle_graph(5);
  EXPECT_EQ(run_local(constant_algorithm(Model::local, 4), c5, 0), std::vector<Label>(5, 4));
  EXPECT_EQ(run_local(own_degree_local(), c5, 1), std::vector<Label>(5, 2));

  auto c16 = cycle_graph(16);
  auto cv = cole_vishkin_cycle();
  auto labels = run_local(cv, c16, cv.complexity(16));
  EXPECT_TRUE(verify_solution(ProblemId::coloring3_cycle, c16, labels).valid);

  EXPECT_THROW(run_local(cv, c16, cv.complexity(16) - 1), InvalidArgument);
}

TEST(RunPartree, Examples) {
  auto c4 = cycle_graph(4);
  auto r = run_partree(constant_algorithm(Model::partree, 0), c4, 0);
  EXPECT_EQ(r.labels, std::vector<Label>(4, 0));
  for (const auto& t : r.transcripts) EXPECT_TRUE(t.entries.empty());

  auto self = run_partree(probe_self(), c4, 1);
  for (Vertex v = 0; v < 4; ++v) {
    ASSERT_EQ(self.transcripts[v].entries.size(), 1u);
    EXPECT_EQ(self.transcripts[v].entries[0].probed, v);
    std::vector<Vertex> nb{(v + 3) % 4, (v + 1) % 4};
    std::sort(nb.begin(), nb.end());
    EXPECT_EQ(self.transcripts[v].entries[0].neighbors, nb);
  }

  auto c8 = cycle_graph(8);
  auto lca = local_to_lca(cole_vishkin_cycle());
  const std::uint64_t r8 = cole_vishkin_cycle().complexity(8);
  auto cv = run_partree(lca, c8, lca.complexity(8));
  EXPECT_TRUE(verify_solution(ProblemId::coloring3_cycle, c8, cv.labels).valid);
  std::uint64_t ball = 0;
  for (std::uint64_t i = 0, p = 1; i <= r8; ++i, p *= 2) ball += p;
  for (const auto& t : cv.transcripts) EXPECT_LE(t.total_probes(), ball);
}

TEST(RunPartree, BudgetOverrunNamesVertex) {
  try {
    run_partree(remote_prober(3, Model::partree), cycle_graph(8), 2);
    FAIL() << "expected BudgetExceeded";
  } catch (const BudgetExceeded& e) {
    EXPECT_NE(std::string(e.what()).find("vertex"), std::string::npos);
  }
}

TEST(RunPartree, PerVertexTrees) {
  auto c5 = cycle_graph(5);
  std::vector<AlgorithmHandle> trees;
  for (Vertex v = 0; v < 5; ++v) trees.push_back(constant_algorithm(Model::partree, static_cast<Label>(v)));
  EXPECT_EQ(run_partree(trees, c5, 0).labels, (std::vector<Label>{0, 1, 2, 3, 4}));
  trees.pop_back();
  EXPECT_THROW(run_partree(trees, c5, 0), InvalidArgument);
}

TEST(RunLca, Examples) {
  auto c6 = cycle_graph(6);
  auto alg = make_algorithm("coloring3");
  auto ctx = default_context(alg, 6);
  std::vector<Vertex> twice{2, 2};
  auto r = run_lca(alg, c6, twice, ctx);
  EXPECT_EQ(r.answers[0], r.answers[1]);
  EXPECT_EQ(r.transcripts[0], r.transcripts[1]);

  auto tp = two_path_graph(6);
  auto sf = two_path_statefull();
  for (auto order : {std::vector<Vertex>{1, 4}, std::vector<Vertex>{4, 1}}) {
    auto out = run_lca(sf, tp, order, default_context(sf, 6));
    EXPECT_EQ(out.answers[0] + out.answers[1], 1);
    EXPECT_EQ(out.answers[0], 1);
  }

  auto empty = run_lca(sf, tp, {}, default_context(sf, 6));
  EXPECT_TRUE(empty.answers.empty());
  EXPECT_TRUE(empty.state_trace.empty());
}

TEST(CheckConsistency, Examples) {
  auto c4 = cycle_graph(4);
  auto zero = constant_algorithm(Model::lca, 0);
  EXPECT_FALSE(check_consistency(zero, c4, default_context(zero, 4), ProblemId::mis));

  auto c8 = cycle_graph(8);
  auto cv = make_algorithm("coloring3");
  EXPECT_TRUE(check_consistency(cv, c8, default_context(cv, 8), ProblemId::coloring3_cycle));

  auto sf = two_path_statefull();
  EXPECT_TRUE(check_consistency(sf, two_path_graph(6), default_context(sf, 6), ProblemId::two_path_leader));
}

TEST(Statelessify, IdempotentOnStateless) {
  auto c6 = cycle_graph(6);
  auto alg = make_algorithm("coloring3");
  auto s = statelessify(alg);
  auto q = all_vertices(c6);
  EXPECT_EQ(run_lca(alg, c6, q, default_context(alg, 6)).answers,
            run_lca(s, c6, q, default_context(s, 6)).answers);
}

TEST(Statelessify, OrderObliviousCacheAgreesUnderRandomOrders) {
  auto c8 = cycle_graph(8);
  auto alg = caching_parity();
  auto s = statelessify(alg);
  EXPECT_TRUE(s.stateless());
  auto q = all_vertices(c8);
  auto reference = run_lca(s, c8, q, default_context(s, 8)).answers;
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(q.begin(), q.end(), rng);
    auto a = run_lca(alg, c8, q, default_context(alg, 8));
    auto b = run_lca(s, c8, q, default_context(s, 8));
    std::vector<Label> ga(8), gb(8);
    for (std::size_t i = 0; i < q.size(); ++i) {
      ga[q[i]] = a.answers[i];
      gb[q[i]] = b.answers[i];
    }
    EXPECT_EQ(ga, reference);
    EXPECT_EQ(gb, reference);
  }
}

TEST(Statelessify, RefusesOrderDependent) {
  EXPECT_THROW(statelessify(two_path_statefull()), InvalidArgument);
  EXPECT_THROW(statelessify(cole_vishkin_cycle()), InvalidArgument);
}

TEST(Models, PartreeEqualsStatelessLca) {
  // Every deterministic stateless registry handle on small graphs.
  const char* algs[] = {"coloring3", "coloring", "mis", "mm", "two-path-stateless", "remote-prober",
                        "constant0", "degree"};
  const char* graphs[] = {"cycle:3", "cycle:7", "path:5", "random-regular:8:2:3", "two-path:10:2",
                          "union(path:3,cycle:4)"};
  for (const char* a : algs) {
    for (const char* gs : graphs) {
      SCOPED_TRACE(std::string(a) + " on " + gs);
      auto g = generate(gs);
      auto alg = make_algorithm(a, 2, 3);
      auto ctx = default_context(alg, g.order());
      auto lca = run_lca(alg, g, all_vertices(g), ctx);
      auto tree = run_partree(alg, g, ctx.probe_budget);
      EXPECT_EQ(tree.labels, lca.answers);
      EXPECT_EQ(tree.transcripts, lca.transcripts);
    }
  }
}

TEST(Models, LocalExecutionOrderDoesNotMatter) {
  auto g = generate("random-regular:10:3:5");
  auto alg = mis_local(3);
  auto r = alg.complexity(10);
  auto expected = run_local(alg, g, r);
  std::mt19937_64 rng(3);
  auto order = all_vertices(g);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Label> got(10);
    for (Vertex v : order) got[v] = alg.local(collect_ball(g, v, r));
    EXPECT_EQ(got, expected);
  }
}

TEST(Models, StateTraceReplay) {
  auto sf = two_path_statefull();
  auto g = two_path_graph(20, 4);
  std::vector<Vertex> q = all_vertices(g);
  std::reverse(q.begin(), q.end());
  auto ctx = default_context(sf, 20);
  auto full = run_lca(sf, g, q, ctx);
  for (std::size_t i = 1; i < q.size(); ++i) {
    std::vector<Vertex> rest(q.begin() + static_cast<std::ptrdiff_t>(i), q.end());
    auto replay = run_lca(sf, g, rest, ctx, full.state_trace[i - 1]);
    ASSERT_EQ(replay.answers.size(), rest.size());
    for (std::size_t j = 0; j < rest.size(); ++j) EXPECT_EQ(replay.answers[j], full.answers[i + j]);
  }
}

TEST(Models, TranscriptsMatchAdjacency) {
  auto g = generate("random-regular:12:3:9");
  auto alg = make_algorithm("mis", 3);
  auto r = run_lca(alg, g, all_vertices(g), default_context(alg, 12));
  for (const auto& t : r.transcripts) {
    for (const auto& e : t.entries) {
      auto nb = g.neighbors(e.probed);
      EXPECT_EQ(e.neighbors, std::vector<Vertex>(nb.begin(), nb.end()));
    }
  }
}

TEST(Models, InvalidLabelIsReported) {
  AlgorithmHandle bad = constant_algorithm(Model::lca, 5);
  bad.labels = LabelDomain::values(0, 1);
  auto c3 = cycle_graph(3);
  EXPECT_THROW(run_lca(bad, c3, all_vertices(c3), default_context(bad, 3)), InvalidLabel);
}

TEST(TranscriptIo, RoundTrip) {
  auto g = cycle_graph(5);
  auto r = run_partree(probe_self(), g, 1);
  std::stringstream ss;
  write_transcripts(ss, r.labels, r.transcripts);
  auto back = read_transcripts(ss);
  ASSERT_EQ(back.size(), 5u);
  for (Vertex v = 0; v < 5; ++v) {
    EXPECT_EQ(back[v].id, v);
    EXPECT_EQ(back[v].answer, r.labels[v]);
    EXPECT_EQ(back[v].transcript, r.transcripts[v]);
  }
  std::stringstream bad("{\"id\":0}\n");
  EXPECT_THROW(read_transcripts(bad), ParseError);
}
