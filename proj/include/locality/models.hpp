#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "locality/error.hpp"
#include "locality/graph.hpp"
#include "locality/parallel.hpp"
#include "locality/problems.hpp"

namespace locality {

inline constexpr std::uint64_t kNoBudget = std::numeric_limits<std::uint64_t>::max();

struct ProbeRecord {
  Vertex probed = 0;
  std::vector<Vertex> neighbors;  // sorted

  bool operator==(const ProbeRecord&) const = default;
};

struct ProbeTranscript {
  std::vector<ProbeRecord> entries;

  std::uint64_t total_probes() const { return entries.size(); }
  bool operator==(const ProbeTranscript&) const = default;
};

// Adjacency oracle over an identifier space [0, id_space()).
class Prober {
 public:
  virtual ~Prober() = default;
  virtual std::vector<Vertex> probe(Vertex id) = 0;
  virtual std::uint64_t id_space() const = 0;
};

class GraphOracle final : public Prober {
 public:
  explicit GraphOracle(const LabeledGraph& g) : g_(g) {}

  std::vector<Vertex> probe(Vertex id) override {
    auto nb = g_.neighbors(id);
    return {nb.begin(), nb.end()};
  }
  std::uint64_t id_space() const override { return g_.order(); }

 private:
  const LabeledGraph& g_;
};

// Forwards to an inner prober, records every probe and enforces a hard cap.
class RecordingProber final : public Prober {
 public:
  RecordingProber(Prober& inner, std::uint64_t budget) : inner_(inner), budget_(budget) {}

  std::vector<Vertex> probe(Vertex id) override {
    if (transcript_.total_probes() >= budget_) {
      throw BudgetExceeded("probe budget " + std::to_string(budget_) + " exceeded");
    }
    auto answer = inner_.probe(id);
    transcript_.entries.push_back({id, answer});
    return answer;
  }
  std::uint64_t id_space() const override { return inner_.id_space(); }

  const ProbeTranscript& transcript() const { return transcript_; }
  ProbeTranscript take_transcript() { return std::move(transcript_); }

 private:
  Prober& inner_;
  std::uint64_t budget_;
  ProbeTranscript transcript_;
};

// Memoizes answers within one query so that composed procedures never probe
// the same identifier twice.
class CachingProber final : public Prober {
 public:
  explicit CachingProber(Prober& inner) : inner_(inner) {}

  std::vector<Vertex> probe(Vertex id) override {
    auto it = cache_.find(id);
    if (it != cache_.end()) return it->second;
    auto answer = inner_.probe(id);
    cache_.emplace(id, answer);
    return answer;
  }
  std::uint64_t id_space() const override { return inner_.id_space(); }

 private:
  Prober& inner_;
  std::unordered_map<Vertex, std::vector<Vertex>> cache_;
};

// Persistent LCA memory with a hard capacity in bytes.
class StateBuffer {
 public:
  explicit StateBuffer(std::size_t capacity = 0) : capacity_(capacity) {}

  std::size_t capacity() const { return capacity_; }
  std::span<const std::uint8_t> read() const { return bytes_; }
  bool empty() const { return bytes_.empty(); }

  void write(std::span<const std::uint8_t> bytes) {
    if (bytes.size() > capacity_) {
      throw StateCapacityExceeded("state write of " + std::to_string(bytes.size()) +
                                  " bytes exceeds capacity " + std::to_string(capacity_));
    }
    bytes_.assign(bytes.begin(), bytes.end());
  }

 private:
  std::size_t capacity_;
  std::vector<std::uint8_t> bytes_;
};

struct QueryContext {
  std::uint64_t seed = 0;
  StateBuffer& state;
};

struct LcaContext {
  std::uint64_t seed = 0;
  std::uint64_t seed_bits = 0;
  std::size_t state_capacity = 0;
  std::uint64_t probe_budget = kNoBudget;
};

// Induced ball around `center`. Vertices are sorted; adjacency and distance
// are aligned with them. Identifiers are the original ones.
struct LocalView {
  Vertex center = 0;
  std::uint64_t radius = 0;
  std::uint64_t id_space = 0;
  std::vector<Vertex> vertices;
  std::vector<std::vector<Vertex>> adjacency;
  std::vector<std::uint64_t> distance;

  std::optional<std::size_t> index_of(Vertex v) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
    if (it == vertices.end() || *it != v) return std::nullopt;
    return static_cast<std::size_t>(it - vertices.begin());
  }
  bool contains(Vertex v) const { return index_of(v).has_value(); }
  std::span<const Vertex> neighbors(Vertex v) const { return adjacency.at(index_of(v).value()); }
  std::uint64_t edge_count() const {
    std::uint64_t total = 0;
    for (const auto& a : adjacency) total += a.size();
    return total / 2;
  }
};

// BFS to `radius`, calling full_neighbors(v) exactly once for every vertex of
// the ball in BFS order (ascending identifier within a layer).
template <class NeighborsFn>
LocalView build_ball(Vertex center, std::uint64_t radius, std::uint64_t id_space,
                     NeighborsFn&& full_neighbors) {
  std::vector<std::pair<Vertex, std::uint64_t>> order{{center, 0}};
  std::unordered_map<Vertex, std::uint64_t> dist{{center, 0}};
  std::unordered_map<Vertex, std::vector<Vertex>> lists;
  std::size_t head = 0;
  std::vector<Vertex> layer_next;
  while (head < order.size()) {
    // Process one layer at a time so that each layer is probed in ascending order.
    std::size_t layer_end = order.size();
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(head),
              order.begin() + static_cast<std::ptrdiff_t>(layer_end));
    layer_next.clear();
    for (; head < layer_end; ++head) {
      auto [u, d] = order[head];
      std::vector<Vertex> nb = full_neighbors(u);
      if (d < radius) {
        for (Vertex w : nb) {
          if (dist.emplace(w, d + 1).second) layer_next.push_back(w);
        }
      }
      lists.emplace(u, std::move(nb));
    }
    for (Vertex w : layer_next) order.emplace_back(w, dist[w]);
  }
  LocalView view;
  view.center = center;
  view.radius = radius;
  view.id_space = id_space;
  for (const auto& [v, d] : order) view.vertices.push_back(v);
  std::sort(view.vertices.begin(), view.vertices.end());
  for (Vertex v : view.vertices) {
    std::vector<Vertex> induced;
    for (Vertex w : lists[v]) {
      if (dist.count(w)) induced.push_back(w);
    }
    std::sort(induced.begin(), induced.end());
    view.adjacency.push_back(std::move(induced));
    view.distance.push_back(dist[v]);
  }
  return view;
}

inline LocalView collect_ball(const LabeledGraph& g, Vertex v, std::uint64_t radius) {
  return build_ball(v, radius, g.order(), [&](Vertex u) {
    auto nb = g.neighbors(u);
    return std::vector<Vertex>(nb.begin(), nb.end());
  });
}

enum class Model { local, partree, lca };

inline std::string_view to_string(Model m) {
  switch (m) {
    case Model::local: return "local";
    case Model::partree: return "partree";
    case Model::lca: return "lca";
  }
  return "?";
}

// Labels are either plain values in [min, max] or vertex identifiers (the
// matching partner), where -1 means "none".
struct LabelDomain {
  bool vertex_ids = false;
  Label min = 0;
  Label max = 0;

  static LabelDomain values(Label lo, Label hi) { return {false, lo, hi}; }
  static LabelDomain partners() { return {true, kUnmatched, kUnmatched}; }
};

using LocalRule = std::function<Label(const LocalView&)>;
using ProbeRule = std::function<Label(Vertex query, Prober& oracle, QueryContext& ctx)>;
using ComplexityFn = std::function<std::uint64_t(std::uint64_t n)>;

struct AlgorithmHandle {
  std::string name;
  Model model = Model::lca;
  // Rounds for local handles, probes per query otherwise, as a function of
  // the identifier-space size.
  ComplexityFn complexity;
  // Degree bound of the graph class the complexity refers to.
  std::uint64_t max_degree = 2;
  LabelDomain labels;
  std::size_t state_capacity = 0;
  bool query_order_oblivious = true;
  // Seed length s(n) in bits; empty for deterministic handles.
  ComplexityFn seed_bits;
  LocalRule local;
  ProbeRule rule;

  bool stateless() const { return state_capacity == 0; }
  bool deterministic() const { return !seed_bits; }
  std::uint64_t seed_length(std::uint64_t n) const { return seed_bits ? seed_bits(n) : 0; }
};

inline void check_label(const AlgorithmHandle& alg, Label label, std::uint64_t id_space,
                        Vertex at) {
  bool ok = alg.labels.vertex_ids
                ? (label == kUnmatched || (label >= 0 && static_cast<std::uint64_t>(label) < id_space))
                : (label >= alg.labels.min && label <= alg.labels.max);
  if (!ok) {
    throw InvalidLabel(alg.name + " produced label " + std::to_string(label) + " at vertex " +
                       std::to_string(at) + " outside its declared label set");
  }
}

inline std::vector<Label> run_local(const AlgorithmHandle& alg, const LabeledGraph& g,
                                    std::uint64_t rounds) {
  if (alg.model != Model::local) throw InvalidArgument(alg.name + " is not a LOCAL handle");
  if (alg.complexity && alg.complexity(g.order()) > rounds) {
    throw InvalidArgument(alg.name + " needs " + std::to_string(alg.complexity(g.order())) +
                          " rounds, got " + std::to_string(rounds));
  }
  std::vector<Label> out(g.order());
  parallel_for(g.order(), [&](std::uint64_t v) {
    out[v] = alg.local(collect_ball(g, v, rounds));
    check_label(alg, out[v], g.order(), v);
  });
  return out;
}

struct PartreeResult {
  std::vector<Label> labels;
  std::vector<ProbeTranscript> transcripts;
};

namespace detail {

inline Label run_tree(const AlgorithmHandle& tree, Prober& oracle, Vertex v, std::uint64_t budget,
                      ProbeTranscript& transcript) {
  if (tree.model == Model::local || !tree.stateless() || !tree.deterministic()) {
    throw InvalidArgument(tree.name + " is not a deterministic probe tree");
  }
  RecordingProber rec(oracle, budget);
  StateBuffer none(0);
  QueryContext ctx{0, none};
  Label label = 0;
  try {
    label = tree.rule(v, rec, ctx);
  } catch (const BudgetExceeded& e) {
    throw BudgetExceeded("tree of vertex " + std::to_string(v) + ": " + e.what());
  }
  check_label(tree, label, oracle.id_space(), v);
  transcript = rec.take_transcript();
  return label;
}

}  // namespace detail

// One tree per vertex: trees[v] answers for v.
inline PartreeResult run_partree(const std::vector<AlgorithmHandle>& trees, const LabeledGraph& g,
                                 std::uint64_t budget) {
  if (trees.size() != g.order()) throw InvalidArgument("need one tree per vertex");
  PartreeResult r{std::vector<Label>(g.order()), std::vector<ProbeTranscript>(g.order())};
  parallel_for(g.order(), [&](std::uint64_t v) {
    GraphOracle oracle(g);
    r.labels[v] = detail::run_tree(trees[v], oracle, v, budget, r.transcripts[v]);
  });
  return r;
}

// Tree family given as one rule that receives the vertex it answers for.
inline PartreeResult run_partree(const AlgorithmHandle& family, const LabeledGraph& g,
                                 std::uint64_t budget) {
  PartreeResult r{std::vector<Label>(g.order()), std::vector<ProbeTranscript>(g.order())};
  parallel_for(g.order(), [&](std::uint64_t v) {
    GraphOracle oracle(g);
    r.labels[v] = detail::run_tree(family, oracle, v, budget, r.transcripts[v]);
  });
  return r;
}

struct LcaResult {
  std::vector<Label> answers;
  std::vector<ProbeTranscript> transcripts;
  std::vector<std::vector<std::uint8_t>> state_trace;  // state after each query
};

// Queries run strictly in the given order; state carries over between them.
inline LcaResult run_lca(const AlgorithmHandle& alg, const LabeledGraph& g,
                         std::span<const Vertex> queries, const LcaContext& ctx,
                         std::span<const std::uint8_t> initial_state = {}) {
  if (alg.model != Model::lca) throw InvalidArgument(alg.name + " is not an LCA handle");
  StateBuffer state(ctx.state_capacity);
  if (!initial_state.empty()) state.write(initial_state);
  GraphOracle oracle(g);
  LcaResult r;
  for (Vertex q : queries) {
    if (q >= g.order()) throw InvalidArgument("query " + std::to_string(q) + " not a vertex");
    RecordingProber rec(oracle, ctx.probe_budget);
    QueryContext qctx{ctx.seed, state};
    Label label = 0;
    try {
      label = alg.rule(q, rec, qctx);
    } catch (const BudgetExceeded& e) {
      throw BudgetExceeded("query " + std::to_string(q) + ": " + e.what());
    }
    check_label(alg, label, g.order(), q);
    r.answers.push_back(label);
    r.transcripts.push_back(rec.take_transcript());
    auto s = state.read();
    r.state_trace.emplace_back(s.begin(), s.end());
  }
  return r;
}

inline LcaContext default_context(const AlgorithmHandle& alg, std::uint64_t n,
                                  std::uint64_t seed = 0) {
  LcaContext ctx;
  ctx.seed = seed;
  ctx.seed_bits = alg.seed_length(n);
  ctx.state_capacity = alg.state_capacity;
  ctx.probe_budget = alg.complexity ? alg.complexity(n) : kNoBudget;
  return ctx;
}

// Runs every vertex as a query in index order and verifies the assembled
// labeling.
inline bool check_consistency(const AlgorithmHandle& alg, const LabeledGraph& g,
                              const LcaContext& ctx, ProblemId problem) {
  std::vector<Vertex> queries(g.order());
  for (Vertex v = 0; v < g.order(); ++v) queries[v] = v;
  auto r = run_lca(alg, g, queries, ctx);
  return verify_solution(problem, g, r.answers).valid;
}

// Runs `alg` from its initial (empty) state on every query. Only sound when
// the caller knows alg is query-order-oblivious.
inline AlgorithmHandle statelessify(const AlgorithmHandle& alg) {
  if (alg.model != Model::lca) throw InvalidArgument(alg.name + " is not an LCA handle");
  if (!alg.query_order_oblivious) {
    throw InvalidArgument(alg.name + " is not declared query-order-oblivious");
  }
  if (alg.stateless()) return alg;
  AlgorithmHandle out = alg;
  out.name = "stateless(" + alg.name + ")";
  out.state_capacity = 0;
  out.rule = [inner = alg.rule, capacity = alg.state_capacity](Vertex q, Prober& oracle,
                                                               QueryContext& ctx) {
    StateBuffer fresh(capacity);
    QueryContext c{ctx.seed, fresh};
    return inner(q, oracle, c);
  };
  return out;
}

}  // namespace locality
