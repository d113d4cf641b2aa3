#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "locality/algorithms.hpp"
#include "locality/error.hpp"
#include "locality/graph.hpp"
#include "locality/models.hpp"
#include "locality/problems.hpp"
#include "locality/rng.hpp"

namespace locality {

// A = two disjoint copies of g, B = its bipartite double cover. Both live on
// [2n]; vertex v of g corresponds to the pair (v, v+n) in either graph.
struct InstancePair {
  std::uint64_t n = 0;
  LabeledGraph a;
  LabeledGraph b;
};

inline InstancePair build_pair(const LabeledGraph& g) {
  return {g.order(), two_copies(g), double_cover(g)};
}

// Outcome `mask` swaps the identifiers of v and v+n for every set bit v.
class PerturbationSpace {
 public:
  explicit PerturbationSpace(std::uint64_t n) : n_(n) {}
  std::uint64_t pairs() const { return n_; }

  std::vector<Vertex> assignment(std::uint64_t mask) const {
    std::vector<Vertex> ids(2 * n_);
    for (Vertex v = 0; v < n_; ++v) {
      const bool swap = n_ < 64 ? (mask >> v & 1) : false;
      ids[v] = swap ? v + n_ : v;
      ids[v + n_] = swap ? v : v + n_;
    }
    return ids;
  }

  // Mask over an arbitrary number of pairs, for sampling.
  std::vector<Vertex> assignment(const std::vector<bool>& bits) const {
    std::vector<Vertex> ids(2 * n_);
    for (Vertex v = 0; v < n_; ++v) {
      ids[v] = bits[v] ? v + n_ : v;
      ids[v + n_] = bits[v] ? v : v + n_;
    }
    return ids;
  }

  LabeledGraph apply(const LabeledGraph& g, std::uint64_t mask) const {
    return g.relabel(assignment(mask));
  }

 private:
  std::uint64_t n_;
};

// Probes in issue order with sorted answers, then the tree's output.
inline std::string encode_transcript(const ProbeTranscript& t, Label label) {
  std::string s;
  for (const auto& e : t.entries) {
    s += std::to_string(e.probed) + ':';
    for (std::size_t i = 0; i < e.neighbors.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(e.neighbors[i]);
    }
    s += ';';
  }
  s += '=' + std::to_string(label);
  return s;
}

enum class DistributionMode { exact, sampled };

// counts[key] / total is the probability of transcript `key`. In exact mode
// total = 2^n and counts are exact.
struct TranscriptDistribution {
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;
  DistributionMode mode = DistributionMode::exact;

  double probability(const std::string& key) const {
    auto it = counts.find(key);
    return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
  }
  bool operator==(const TranscriptDistribution& o) const {
    return counts == o.counts && total == o.total;
  }
};

inline constexpr std::uint64_t kExactPairLimit = 12;

struct SamplingOptions {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
};

// Distributions of the transcript of `tree` at every identifier of the
// 2n-vertex `graph` over the perturbation outcomes.
inline std::vector<TranscriptDistribution> transcript_distributions(
    const AlgorithmHandle& tree, const LabeledGraph& graph, std::uint64_t budget,
    DistributionMode mode, const SamplingOptions& sampling = {}) {
  if (graph.order() % 2) throw InvalidArgument("perturbed instances have 2n vertices");
  const std::uint64_t n = graph.order() / 2;
  PerturbationSpace space(n);
  if (mode == DistributionMode::exact && n > kExactPairLimit) {
    throw ScaleGuard("exact transcript enumeration limited to n <= 12");
  }
  const std::uint64_t outcomes = mode == DistributionMode::exact ? std::uint64_t{1} << n : sampling.samples;
  if (outcomes == 0) throw InvalidArgument("sampled mode needs samples >= 1");
  std::vector<std::vector<std::string>> keys(outcomes);
  parallel_for(outcomes, [&](std::uint64_t i) {
    LabeledGraph p;
    if (mode == DistributionMode::exact) {
      p = space.apply(graph, i);
    } else {
      const std::uint64_t key = derive_seed(sampling.seed, "perturbation", i);
      std::vector<bool> bits(n);
      for (std::uint64_t v = 0; v < n; ++v) bits[v] = stream_word(key, v / 64) >> (v % 64) & 1;
      p = graph.relabel(space.assignment(bits));
    }
    GraphOracle oracle(p);
    keys[i].resize(graph.order());
    for (Vertex v = 0; v < graph.order(); ++v) {
      ProbeTranscript t;
      Label label = detail::run_tree(tree, oracle, v, budget, t);
      keys[i][v] = encode_transcript(t, label);
    }
  });
  std::vector<TranscriptDistribution> out(graph.order());
  for (auto& d : out) {
    d.total = outcomes;
    d.mode = mode;
  }
  for (const auto& row : keys) {
    for (Vertex v = 0; v < graph.order(); ++v) ++out[v].counts[row[v]];
  }
  return out;
}

inline TranscriptDistribution transcript_distribution(const AlgorithmHandle& tree,
                                                      const LabeledGraph& graph, Vertex v,
                                                      std::uint64_t budget, DistributionMode mode,
                                                      const SamplingOptions& sampling = {}) {
  if (v >= graph.order()) throw InvalidArgument("query outside the instance");
  return transcript_distributions(tree, graph, budget, mode, sampling)[v];
}

struct Witness {
  std::string transcript;
  std::uint64_t count_a = 0;
  std::uint64_t count_b = 0;
  std::uint64_t hash() const { return fnv1a64(transcript); }
};

struct QueryVerdict {
  Vertex query = 0;
  bool equal = true;
  std::optional<Witness> witness;
};

struct IndistinguishabilityReport {
  std::string tree;
  std::uint64_t t = 0;
  std::uint64_t girth = 0;   // 0 when g is acyclic
  bool all_equal = true;
  std::vector<QueryVerdict> queries;
};

// Exact comparison of the transcript distributions on p(A_G) and p(B_G) for
// every query identifier. A witness is the first transcript (in key order)
// whose counts differ.
inline IndistinguishabilityReport indistinguishability_check(const LabeledGraph& g,
                                                             const AlgorithmHandle& tree,
                                                             std::uint64_t t) {
  auto pair = build_pair(g);
  auto da = transcript_distributions(tree, pair.a, t, DistributionMode::exact);
  auto db = transcript_distributions(tree, pair.b, t, DistributionMode::exact);
  IndistinguishabilityReport r;
  r.tree = tree.name;
  r.t = t;
  r.girth = girth(g).value_or(0);
  for (Vertex v = 0; v < pair.a.order(); ++v) {
    QueryVerdict q;
    q.query = v;
    q.equal = da[v] == db[v];
    if (!q.equal) {
      auto ia = da[v].counts.begin();
      auto ib = db[v].counts.begin();
      while (ia != da[v].counts.end() || ib != db[v].counts.end()) {
        if (ib == db[v].counts.end() || (ia != da[v].counts.end() && ia->first < ib->first)) {
          q.witness = Witness{ia->first, ia->second, 0};
          break;
        }
        if (ia == da[v].counts.end() || ib->first < ia->first) {
          q.witness = Witness{ib->first, 0, ib->second};
          break;
        }
        if (ia->second != ib->second) {
          q.witness = Witness{ia->first, ia->second, ib->second};
          break;
        }
        ++ia;
        ++ib;
      }
      r.all_equal = false;
    }
    r.queries.push_back(std::move(q));
  }
  return r;
}

// Sum over queries of Pr[tree answers 1], as a numerator over 2^n.
inline std::uint64_t expected_ones_numerator(const AlgorithmHandle& tree, const LabeledGraph& graph,
                                             std::uint64_t t) {
  const std::uint64_t n = graph.order() / 2;
  if (n > kExactPairLimit) throw ScaleGuard("exact enumeration limited to n <= 12");
  PerturbationSpace space(n);
  std::vector<std::uint64_t> ones(std::uint64_t{1} << n, 0);
  parallel_for(ones.size(), [&](std::uint64_t mask) {
    auto p = space.apply(graph, mask);
    GraphOracle oracle(p);
    for (Vertex v = 0; v < graph.order(); ++v) {
      ProbeTranscript tr;
      if (detail::run_tree(tree, oracle, v, t, tr) == 1) ++ones[mask];
    }
  });
  std::uint64_t total = 0;
  for (auto x : ones) total += x;
  return total;
}

// ---- registered probe trees ----

namespace detail {

inline AlgorithmHandle tree_handle(std::string name, std::uint64_t t, ProbeRule rule) {
  AlgorithmHandle h;
  h.name = std::move(name);
  h.model = Model::partree;
  h.max_degree = kSaturated;
  h.complexity = [t](std::uint64_t) { return t; };
  h.labels = LabelDomain::values(0, 1);
  h.rule = std::move(rule);
  return h;
}

// Walk from the query, each step probing the current vertex and moving to
// its smallest (or largest) unvisited neighbor. Answers 1 iff the query's id
// is below every id seen.
inline Label walk(Vertex q, Prober& oracle, std::uint64_t t, bool smallest) {
  std::vector<Vertex> visited{q};
  Vertex cur = q;
  Vertex lowest = q;
  for (std::uint64_t i = 0; i < t; ++i) {
    auto nb = oracle.probe(cur);
    std::optional<Vertex> next;
    for (Vertex w : nb) {
      lowest = std::min(lowest, w);
      if (std::find(visited.begin(), visited.end(), w) != visited.end()) continue;
      if (!next || (smallest ? w < *next : w > *next)) next = w;
    }
    if (!next) break;
    visited.push_back(*next);
    cur = *next;
  }
  return lowest == q ? 1 : 0;
}

}  // namespace detail

inline std::vector<std::string> tree_ids() {
  return {"constant", "probe-self", "bfs", "walk-min", "walk-max", "remote", "adaptive-mixed",
          "triangle-walk"};
}

// Deterministic per-vertex probe trees with at most t probes.
inline AlgorithmHandle make_tree(const std::string& id, std::uint64_t t) {
  using detail::tree_handle;
  if (id == "constant") {
    AlgorithmHandle h = constant_algorithm(Model::partree, 0);
    h.labels = LabelDomain::values(0, 1);
    return h;
  }
  if (id == "probe-self") {
    return tree_handle("probe-self", std::min<std::uint64_t>(t, 1),
                       [t](Vertex q, Prober& oracle, QueryContext&) -> Label {
                         if (t == 0) return 0;
                         return oracle.probe(q).size() % 2 ? 1 : 0;
                       });
  }
  if (id == "bfs") {
    // Ascending BFS from the query until t probes; 1 iff the query is the
    // smallest id seen.
    return tree_handle("bfs-" + std::to_string(t), t, [t](Vertex q, Prober& oracle, QueryContext&) -> Label {
      std::vector<Vertex> frontier{q}, seen{q};
      std::uint64_t used = 0;
      Vertex lowest = q;
      while (!frontier.empty() && used < t) {
        std::vector<Vertex> next;
        for (Vertex u : frontier) {
          if (used == t) break;
          ++used;
          for (Vertex w : oracle.probe(u)) {
            lowest = std::min(lowest, w);
            if (std::find(seen.begin(), seen.end(), w) == seen.end()) {
              seen.push_back(w);
              next.push_back(w);
            }
          }
        }
        std::sort(next.begin(), next.end());
        frontier = std::move(next);
      }
      return lowest == q ? 1 : 0;
    });
  }
  if (id == "walk-min") {
    return tree_handle("walk-min-" + std::to_string(t), t, [t](Vertex q, Prober& oracle, QueryContext&) {
      return detail::walk(q, oracle, t, true);
    });
  }
  if (id == "walk-max") {
    return tree_handle("walk-max-" + std::to_string(t), t, [t](Vertex q, Prober& oracle, QueryContext&) {
      return detail::walk(q, oracle, t, false);
    });
  }
  if (id == "remote") {
    AlgorithmHandle h = remote_prober(t, Model::partree);
    h.labels = LabelDomain::values(0, 1);
    return h;
  }
  if (id == "adaptive-mixed") {
    // Probe the query, then alternate between the smallest neighbor below n
    // and the largest neighbor overall, depending on the parity of the last
    // answer's size.
    return tree_handle("adaptive-mixed-" + std::to_string(t), t,
                       [t](Vertex q, Prober& oracle, QueryContext&) -> Label {
                         Vertex cur = q;
                         std::uint64_t sum = 0;
                         const Vertex half = oracle.id_space() / 2;
                         for (std::uint64_t i = 0; i < t; ++i) {
                           auto nb = oracle.probe(cur);
                           sum += nb.size();
                           if (nb.empty()) break;
                           Vertex pick = nb.back();
                           if (nb.size() % 2 == 0) {
                             for (Vertex w : nb) {
                               if (w < half) {
                                 pick = w;
                                 break;
                               }
                             }
                           }
                           cur = pick;
                         }
                         return sum % 2 ? 1 : 0;
                       });
  }
  if (id == "triangle-walk") {
    // Probe the query, its smallest neighbor u, then the smallest neighbor w
    // of u other than the query. Answers 1 iff w is adjacent to the query.
    return tree_handle("triangle-walk", std::min<std::uint64_t>(t, 3),
                       [t](Vertex q, Prober& oracle, QueryContext&) -> Label {
                         if (t < 3) return 0;
                         auto a = oracle.probe(q);
                         if (a.empty()) return 0;
                         const Vertex u = a.front();
                         std::optional<Vertex> w;
                         for (Vertex x : oracle.probe(u)) {
                           if (x != q) {
                             w = x;
                             break;
                           }
                         }
                         if (!w) return 0;
                         auto c = oracle.probe(*w);
                         return std::binary_search(c.begin(), c.end(), q) ? 1 : 0;
                       });
  }
  throw InvalidArgument("unknown tree '" + id + "'");
}

// ---- approximation gaps ----

inline constexpr std::uint64_t kGapVertexLimit = 24;

struct GapReport {
  std::uint64_t n = 0;
  std::uint64_t alpha_a = 0, alpha_b = 0;
  std::uint64_t maxcut_a = 0, maxcut_b = 0;
  std::uint64_t edges = 0;             // per instance (both have 2|E(g)|)
  double cut_fraction_a = 0, cut_fraction_b = 0;
  double independence_ratio = 0;       // alpha(A) / alpha(B)
  double implied_color_bound = 0;      // 2n / alpha(A)
};

inline GapReport gap_report(const LabeledGraph& g) {
  auto pair = build_pair(g);
  if (pair.a.order() > kGapVertexLimit) throw ScaleGuard("exact gap report needs 2n <= 24");
  GapReport r;
  r.n = g.order();
  r.alpha_a = max_independent_set_size(pair.a);
  r.alpha_b = max_independent_set_size(pair.b);
  r.maxcut_a = max_cut_size(pair.a);
  r.maxcut_b = max_cut_size(pair.b);
  r.edges = pair.a.edge_count();
  if (r.edges > 0) {
    r.cut_fraction_a = static_cast<double>(r.maxcut_a) / static_cast<double>(r.edges);
    r.cut_fraction_b = static_cast<double>(r.maxcut_b) / static_cast<double>(r.edges);
  }
  r.independence_ratio = r.alpha_b ? static_cast<double>(r.alpha_a) / static_cast<double>(r.alpha_b) : 0;
  r.implied_color_bound = r.alpha_a ? static_cast<double>(pair.a.order()) / static_cast<double>(r.alpha_a) : 0;
  return r;
}

}  // namespace locality
