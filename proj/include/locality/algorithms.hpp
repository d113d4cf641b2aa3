#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "locality/error.hpp"
#include "locality/graph.hpp"
#include "locality/models.hpp"
#include "locality/rng.hpp"

namespace locality {

inline constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

inline std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > kSaturated - b ? kSaturated : a + b;
}

inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a > kSaturated / b ? kSaturated : a * b;
}

// Largest possible ball of the given radius in a graph of max degree delta:
// 1 + delta * sum_{i<radius} (delta-1)^i. Saturates instead of overflowing.
inline std::uint64_t ball_size_bound(std::uint64_t delta, std::uint64_t radius) {
  std::uint64_t total = 1;
  std::uint64_t layer = delta;
  for (std::uint64_t i = 0; i < radius && layer > 0; ++i) {
    total = saturating_add(total, layer);
    if (total == kSaturated) break;
    layer = saturating_mul(layer, delta > 0 ? delta - 1 : 0);
  }
  return total;
}

// Number of bit-reduction iterations that take colors in [0, id_space) down
// to [0, 6). One iteration maps a range of L-bit colors into [0, 2L).
inline std::uint64_t cole_vishkin_iterations(std::uint64_t id_space) {
  std::uint64_t b = id_space;
  std::uint64_t iterations = 0;
  while (b > 6) {
    b = 2 * static_cast<std::uint64_t>(std::bit_width(b - 1));
    ++iterations;
  }
  return iterations;
}

// Node set with adjacency by index; the input of a synchronous round program.
struct Topology {
  std::vector<Vertex> ids;
  std::vector<std::vector<std::uint32_t>> adj;
};

inline Topology topology_of(const LocalView& view) {
  Topology t;
  t.ids = view.vertices;
  t.adj.resize(view.vertices.size());
  for (std::size_t i = 0; i < view.vertices.size(); ++i) {
    for (Vertex w : view.adjacency[i]) t.adj[i].push_back(static_cast<std::uint32_t>(*view.index_of(w)));
  }
  return t;
}

// Synchronous (delta+1)-coloring for max degree `delta`, optionally followed by
// a greedy independent-set sweep over the color classes.
//
// Forest i assigns each node the i-th smallest of its larger neighbors as
// parent. Each forest is colored with 3 colors (bit reduction, then three
// shift-down/recolor stages removing colors 5, 4, 3). The product of the
// forest colors is a proper 3^delta coloring, reduced to delta+1 colors one
// class per round.
class ColorSweep {
 public:
  ColorSweep(std::uint64_t id_space, std::uint64_t delta, bool with_mis)
      : delta_(delta), with_mis_(with_mis), iterations_(cole_vishkin_iterations(id_space)) {
    if (delta > 12) throw ScaleGuard("color sweep supports delta <= 12");
    product_ = 1;
    for (std::uint64_t i = 0; i < delta; ++i) product_ *= 3;
  }

  std::uint64_t updates() const {
    return iterations_ + 6 + (product_ - delta_ - 1) + (with_mis_ ? delta_ + 1 : 0);
  }
  // One extra round: a node has to learn its neighbors before the first update.
  std::uint64_t rounds() const { return updates() + 1; }
  std::uint64_t palette() const { return delta_ + 1; }

  struct Output {
    std::uint64_t color = 0;
    bool in_set = false;
  };

  std::vector<Output> run(const Topology& t) const {
    const std::size_t m = t.ids.size();
    const std::size_t F = delta_;
    constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> parent(m * F, kNone);
    for (std::size_t v = 0; v < m; ++v) {
      std::vector<std::uint32_t> larger;
      for (auto w : t.adj[v]) {
        if (t.ids[w] > t.ids[v]) larger.push_back(w);
      }
      std::sort(larger.begin(), larger.end(),
                [&](std::uint32_t a, std::uint32_t b) { return t.ids[a] < t.ids[b]; });
      for (std::size_t i = 0; i < std::min(F, larger.size()); ++i) parent[v * F + i] = larger[i];
    }
    std::vector<std::uint64_t> color(m * F), next(m * F), before(m * F);
    for (std::size_t v = 0; v < m; ++v) {
      for (std::size_t i = 0; i < F; ++i) color[v * F + i] = t.ids[v];
    }

    for (std::uint64_t it = 0; it < iterations_; ++it) {
      for (std::size_t x = 0; x < m * F; ++x) {
        const std::uint64_t c = color[x];
        const std::uint32_t p = parent[x];
        if (p == kNone) {
          next[x] = c & 1;
        } else {
          const std::uint64_t diff = c ^ color[p * F + x % F];
          // Equal colors only occur outside the correctness radius.
          const std::uint64_t idx = diff ? static_cast<std::uint64_t>(std::countr_zero(diff)) : 0;
          next[x] = 2 * idx + ((c >> idx) & 1);
        }
      }
      color.swap(next);
    }

    for (std::uint64_t target : {5, 4, 3}) {
      for (std::size_t x = 0; x < m * F; ++x) {
        const std::uint32_t p = parent[x];
        before[x] = color[x];
        next[x] = p == kNone ? (color[x] == 0 ? 1 : 0) : color[p * F + x % F];
      }
      color.swap(next);
      for (std::size_t x = 0; x < m * F; ++x) {
        next[x] = color[x];
        if (color[x] != target) continue;
        const std::uint32_t p = parent[x];
        for (std::uint64_t c = 0; c < 3; ++c) {
          if (p != kNone && color[p * F + x % F] == c) continue;
          if (before[x] == c) continue;
          next[x] = c;
          break;
        }
      }
      color.swap(next);
    }

    std::vector<std::uint64_t> comb(m, 0), comb_next(m);
    for (std::size_t v = 0; v < m; ++v) {
      std::uint64_t weight = 1;
      for (std::size_t i = 0; i < F; ++i) {
        comb[v] += color[v * F + i] * weight;
        weight *= 3;
      }
    }
    for (std::uint64_t target = product_ - 1; target > delta_; --target) {
      for (std::size_t v = 0; v < m; ++v) {
        comb_next[v] = comb[v];
        if (comb[v] != target) continue;
        for (std::uint64_t c = 0; c <= delta_; ++c) {
          bool used = std::any_of(t.adj[v].begin(), t.adj[v].end(),
                                  [&](std::uint32_t w) { return comb[w] == c; });
          if (!used) {
            comb_next[v] = c;
            break;
          }
        }
      }
      comb.swap(comb_next);
    }

    std::vector<Output> out(m);
    for (std::size_t v = 0; v < m; ++v) out[v].color = comb[v];
    if (with_mis_) {
      std::vector<bool> joined(m, false), joined_next(m);
      for (std::uint64_t c = 0; c <= delta_; ++c) {
        for (std::size_t v = 0; v < m; ++v) {
          joined_next[v] = joined[v];
          if (comb[v] != c || joined[v]) continue;
          joined_next[v] = std::none_of(t.adj[v].begin(), t.adj[v].end(),
                                        [&](std::uint32_t w) { return joined[w]; });
        }
        joined.swap(joined_next);
      }
      for (std::size_t v = 0; v < m; ++v) out[v].in_set = joined[v];
    }
    return out;
  }

 private:
  std::uint64_t delta_;
  bool with_mis_;
  std::uint64_t iterations_;
  std::uint64_t product_ = 1;
};

inline std::uint64_t center_index(const LocalView& view) { return *view.index_of(view.center); }

// Line graph of the complete part of a view. Node ids are min*id_space+max.
// Returns the topology and, for every node, its endpoints.
inline std::pair<Topology, std::vector<Edge>> line_topology(const LocalView& view) {
  if (view.id_space > (std::uint64_t{1} << 32)) {
    throw ScaleGuard("line-graph identifiers need id_space <= 2^32");
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < view.vertices.size(); ++i) {
    for (Vertex w : view.adjacency[i]) {
      if (view.vertices[i] < w) edges.emplace_back(view.vertices[i], w);
    }
  }
  std::sort(edges.begin(), edges.end());
  auto edge_index = [&](Vertex a, Vertex b) {
    if (a > b) std::swap(a, b);
    return static_cast<std::uint32_t>(std::lower_bound(edges.begin(), edges.end(), Edge{a, b}) -
                                      edges.begin());
  };
  Topology t;
  t.adj.resize(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto [a, b] = edges[e];
    t.ids.push_back(a * view.id_space + b);
    for (Vertex end : {a, b}) {
      for (Vertex w : view.neighbors(end)) {
        auto f = edge_index(end, w);
        if (f != e) t.adj[e].push_back(f);
      }
    }
  }
  return {std::move(t), std::move(edges)};
}

// Proper 3-coloring of cycles. Vertices whose degree is not 2 answer
// kErrorLabel.
inline AlgorithmHandle cole_vishkin_cycle() {
  AlgorithmHandle h;
  h.name = "cole-vishkin-cycle";
  h.model = Model::local;
  h.max_degree = 2;
  h.complexity = [](std::uint64_t n) { return ColorSweep(n, 2, false).rounds(); };
  h.labels = LabelDomain::values(kErrorLabel, 2);
  h.local = [](const LocalView& view) -> Label {
    if (view.radius > 0 && view.neighbors(view.center).size() != 2) return kErrorLabel;
    ColorSweep sweep(view.id_space, 2, false);
    return static_cast<Label>(sweep.run(topology_of(view))[center_index(view)].color);
  };
  return h;
}

inline AlgorithmHandle cole_vishkin(std::uint64_t delta) {
  AlgorithmHandle h;
  h.name = "cole-vishkin-d" + std::to_string(delta);
  h.model = Model::local;
  h.max_degree = delta;
  h.complexity = [delta](std::uint64_t n) { return ColorSweep(n, delta, false).rounds(); };
  h.labels = LabelDomain::values(0, static_cast<Label>(delta));
  h.local = [delta](const LocalView& view) -> Label {
    ColorSweep sweep(view.id_space, delta, false);
    return static_cast<Label>(sweep.run(topology_of(view))[center_index(view)].color);
  };
  return h;
}

inline AlgorithmHandle mis_local(std::uint64_t delta) {
  AlgorithmHandle h;
  h.name = "mis-local-d" + std::to_string(delta);
  h.model = Model::local;
  h.max_degree = delta;
  h.complexity = [delta](std::uint64_t n) { return ColorSweep(n, delta, true).rounds(); };
  h.labels = LabelDomain::values(0, 1);
  h.local = [delta](const LocalView& view) -> Label {
    ColorSweep sweep(view.id_space, delta, true);
    return sweep.run(topology_of(view))[center_index(view)].in_set ? 1 : 0;
  };
  return h;
}

// Maximal matching as an independent set of the line graph. A line-graph
// node is complete once both endpoints are, which costs one extra hop.
inline AlgorithmHandle matching_local(std::uint64_t delta) {
  const std::uint64_t line_delta = delta >= 1 ? 2 * delta - 2 : 0;
  AlgorithmHandle h;
  h.name = "matching-local-d" + std::to_string(delta);
  h.model = Model::local;
  h.max_degree = delta;
  h.complexity = [line_delta](std::uint64_t n) {
    return ColorSweep(saturating_mul(n, n), line_delta, true).updates() + 2;
  };
  h.labels = LabelDomain::partners();
  h.local = [line_delta](const LocalView& view) -> Label {
    auto [topo, edges] = line_topology(view);
    ColorSweep sweep(view.id_space * view.id_space, line_delta, true);
    auto out = sweep.run(topo);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      auto [a, b] = edges[e];
      if (!out[e].in_set) continue;
      if (a == view.center) return static_cast<Label>(b);
      if (b == view.center) return static_cast<Label>(a);
    }
    return kUnmatched;
  };
  return h;
}

// Stateless LCA that probes the whole radius-r ball (BFS, each vertex once)
// and evaluates the LOCAL rule on it. Without `fixed_rounds` the radius is
// the handle's own round count for the oracle's identifier space.
inline AlgorithmHandle local_to_lca(const AlgorithmHandle& alg,
                                    std::optional<std::uint64_t> fixed_rounds = {}) {
  if (alg.model != Model::local) throw InvalidArgument(alg.name + " is not a LOCAL handle");
  AlgorithmHandle h = alg;
  h.name = "lca(" + alg.name + ")";
  h.model = Model::lca;
  auto rounds = [inner = alg.complexity, fixed_rounds](std::uint64_t n) {
    return fixed_rounds ? *fixed_rounds : inner(n);
  };
  h.complexity = [rounds, delta = alg.max_degree](std::uint64_t n) {
    return ball_size_bound(delta, rounds(n));
  };
  h.rule = [rounds, rule = alg.local](Vertex q, Prober& oracle, QueryContext&) {
    const std::uint64_t r = rounds(oracle.id_space());
    LocalView view = build_ball(q, r, oracle.id_space(), [&](Vertex u) { return oracle.probe(u); });
    return rule(view);
  };
  h.local = nullptr;
  return h;
}

// Greedy sweep by ascending color, evaluated recursively: v joins iff no
// neighbor of smaller color joins. Probes are cached within a query.
inline AlgorithmHandle mis_from_coloring(const AlgorithmHandle& coloring) {
  if (coloring.model == Model::local || !coloring.stateless()) {
    throw InvalidArgument("mis_from_coloring needs a stateless probe algorithm");
  }
  const std::uint64_t colors = static_cast<std::uint64_t>(std::max<Label>(coloring.labels.max, 0));
  AlgorithmHandle h;
  h.name = "mis(" + coloring.name + ")";
  h.model = Model::lca;
  h.max_degree = coloring.max_degree;
  h.labels = LabelDomain::values(0, 1);
  h.seed_bits = coloring.seed_bits;
  h.complexity = [inner = coloring.complexity, delta = coloring.max_degree, colors](std::uint64_t n) {
    return saturating_mul(ball_size_bound(delta, colors), inner(n));
  };
  h.rule = [coloring](Vertex q, Prober& oracle, QueryContext& ctx) -> Label {
    CachingProber cache(oracle);
    std::unordered_map<Vertex, Label> color;
    std::unordered_map<Vertex, bool> member;
    auto color_of = [&](Vertex x) {
      auto it = color.find(x);
      if (it != color.end()) return it->second;
      Label c = coloring.rule(x, cache, ctx);
      color.emplace(x, c);
      return c;
    };
    auto in_set = [&](auto&& self, Vertex x) -> bool {
      auto it = member.find(x);
      if (it != member.end()) return it->second;
      const Label cx = color_of(x);
      bool joined = true;
      for (Vertex y : cache.probe(x)) {
        if (color_of(y) < cx && self(self, y)) {
          joined = false;
          break;
        }
      }
      member.emplace(x, joined);
      return joined;
    };
    return in_set(in_set, q) ? 1 : 0;
  };
  return h;
}

inline AlgorithmHandle maximal_matching(std::uint64_t delta) {
  AlgorithmHandle h = local_to_lca(matching_local(delta));
  h.name = "mm-d" + std::to_string(delta);
  return h;
}

// Two-path leader election with persistent state: the first middle vertex
// queried becomes the leader and its identifier is stored.
inline AlgorithmHandle two_path_statefull() {
  AlgorithmHandle h;
  h.name = "two-path-statefull";
  h.model = Model::lca;
  h.complexity = [](std::uint64_t) { return std::uint64_t{1}; };
  h.labels = LabelDomain::values(0, 1);
  h.state_capacity = 8;
  h.query_order_oblivious = false;
  h.rule = [](Vertex q, Prober& oracle, QueryContext& ctx) -> Label {
    if (oracle.probe(q).size() != 2) return 0;
    auto s = ctx.state.read();
    if (s.empty()) {
      // Little-endian, as few bytes as the identifier needs.
      std::vector<std::uint8_t> bytes;
      for (Vertex x = q; x > 0 || bytes.empty(); x >>= 8) bytes.push_back(static_cast<std::uint8_t>(x));
      ctx.state.write(bytes);
      return 1;
    }
    Vertex leader = 0;
    for (std::size_t i = s.size(); i-- > 0;) leader = (leader << 8) | s[i];
    return leader == q ? 1 : 0;
  };
  return h;
}

// Scans identifiers upward for the other middle vertex; the smaller middle
// identifier is the leader. Non-middle queries cost one probe.
inline AlgorithmHandle two_path_stateless_baseline() {
  AlgorithmHandle h;
  h.name = "two-path-stateless";
  h.model = Model::lca;
  h.complexity = [](std::uint64_t n) { return n; };
  h.labels = LabelDomain::values(0, 1);
  h.rule = [](Vertex q, Prober& oracle, QueryContext&) -> Label {
    if (oracle.probe(q).size() != 2) return 0;
    for (Vertex x = 0; x < oracle.id_space(); ++x) {
      if (x == q) continue;
      if (oracle.probe(x).size() == 2) return q < x ? 1 : 0;
    }
    return 1;
  };
  return h;
}

// ---- small handles used by tests and experiments ----

inline AlgorithmHandle constant_algorithm(Model model, Label value) {
  AlgorithmHandle h;
  h.name = "constant" + std::to_string(value);
  h.model = model;
  h.max_degree = kSaturated;
  h.complexity = [](std::uint64_t) { return std::uint64_t{0}; };
  h.labels = LabelDomain::values(value, value);
  h.local = [value](const LocalView&) { return value; };
  h.rule = [value](Vertex, Prober&, QueryContext&) { return value; };
  return h;
}

inline AlgorithmHandle own_degree_local() {
  AlgorithmHandle h;
  h.name = "own-degree";
  h.model = Model::local;
  h.max_degree = kSaturated;
  h.complexity = [](std::uint64_t) { return std::uint64_t{1}; };
  h.labels = LabelDomain::values(0, std::numeric_limits<Label>::max());
  h.local = [](const LocalView& view) {
    return static_cast<Label>(view.neighbors(view.center).size());
  };
  return h;
}

// Probes the query itself and answers its degree.
inline AlgorithmHandle probe_self(Model model = Model::partree) {
  AlgorithmHandle h;
  h.name = "probe-self";
  h.model = model;
  h.max_degree = kSaturated;
  h.complexity = [](std::uint64_t) { return std::uint64_t{1}; };
  h.labels = LabelDomain::values(0, std::numeric_limits<Label>::max());
  h.rule = [](Vertex q, Prober& oracle, QueryContext&) {
    return static_cast<Label>(oracle.probe(q).size());
  };
  return h;
}

// Probes one fixed identifier regardless of the query; answers 0.
inline AlgorithmHandle fixed_probe(Vertex target, Model model = Model::lca) {
  AlgorithmHandle h;
  h.name = "fixed-probe-" + std::to_string(target);
  h.model = model;
  h.max_degree = kSaturated;
  h.complexity = [](std::uint64_t) { return std::uint64_t{1}; };
  h.labels = LabelDomain::values(0, 0);
  h.rule = [target](Vertex, Prober& oracle, QueryContext&) -> Label {
    oracle.probe(target);
    return 0;
  };
  return h;
}

// Worst case for the relabelling simulation: every probe goes to the smallest
// identifier it has not seen yet, so no probe is ever local.
inline AlgorithmHandle remote_prober(std::uint64_t t, Model model = Model::lca) {
  AlgorithmHandle h;
  h.name = "remote-prober-" + std::to_string(t);
  h.model = model;
  h.max_degree = kSaturated;
  h.complexity = [t](std::uint64_t) { return t; };
  h.labels = LabelDomain::values(0, 0);
  h.rule = [t](Vertex q, Prober& oracle, QueryContext&) -> Label {
    std::vector<Vertex> seen{q};
    Vertex next = 0;
    for (std::uint64_t i = 0; i < t; ++i) {
      while (std::find(seen.begin(), seen.end(), next) != seen.end()) ++next;
      if (next >= oracle.id_space()) break;
      seen.push_back(next);
      for (Vertex w : oracle.probe(next)) seen.push_back(w);
    }
    return 0;
  };
  return h;
}

// One probe to a seeded pseudo-random identifier (seed from the LCA context).
inline AlgorithmHandle random_prober() {
  AlgorithmHandle h;
  h.name = "random-prober";
  h.model = Model::lca;
  h.max_degree = kSaturated;
  h.complexity = [](std::uint64_t) { return std::uint64_t{1}; };
  h.seed_bits = [](std::uint64_t) { return std::uint64_t{64}; };
  h.labels = LabelDomain::values(0, 0);
  h.rule = [](Vertex q, Prober& oracle, QueryContext& ctx) -> Label {
    std::uint64_t counter = 0;
    oracle.probe(stream_uniform(ctx.seed ^ splitmix64(q), counter, oracle.id_space()));
    return 0;
  };
  return h;
}

// Registry keyed by the ids accepted on the command line.
inline std::vector<std::string> algorithm_ids() {
  return {"coloring3", "coloring3-local", "coloring", "coloring-local", "mis", "mis-local",
          "mm", "mm-local", "two-path-statefull", "two-path-stateless", "remote-prober",
          "random-prober", "constant0", "degree"};
}

inline AlgorithmHandle make_algorithm(const std::string& id, std::uint64_t delta = 2,
                                      std::uint64_t t = 2) {
  if (id == "coloring3") return local_to_lca(cole_vishkin_cycle());
  if (id == "coloring3-local") return cole_vishkin_cycle();
  if (id == "coloring") return local_to_lca(cole_vishkin(delta));
  if (id == "coloring-local") return cole_vishkin(delta);
  if (id == "mis") return mis_from_coloring(local_to_lca(cole_vishkin(delta)));
  if (id == "mis-local") return mis_local(delta);
  if (id == "mm") return maximal_matching(delta);
  if (id == "mm-local") return matching_local(delta);
  if (id == "two-path-statefull") return two_path_statefull();
  if (id == "two-path-stateless") return two_path_stateless_baseline();
  if (id == "remote-prober") return remote_prober(t);
  if (id == "random-prober") return random_prober();
  if (id == "constant0") return constant_algorithm(Model::lca, 0);
  if (id == "degree") return probe_self(Model::lca);
  throw InvalidArgument("unknown algorithm '" + id + "'");
}

// Problem each registered algorithm solves, for verification.
inline std::optional<ProblemId> problem_of(const std::string& id) {
  if (id == "coloring3" || id == "coloring3-local") return ProblemId::coloring3_cycle;
  if (id == "coloring" || id == "coloring-local") return ProblemId::coloring_deltaplus1;
  if (id == "mis" || id == "mis-local") return ProblemId::mis;
  if (id == "mm" || id == "mm-local") return ProblemId::maximal_matching;
  if (id == "two-path-statefull" || id == "two-path-stateless") return ProblemId::two_path_leader;
  return std::nullopt;
}

}  // namespace locality
