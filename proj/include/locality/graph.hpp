#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "locality/error.hpp"

namespace locality {

using Vertex = std::uint64_t;
using Edge = std::pair<Vertex, Vertex>;

inline constexpr std::uint64_t kUnreachable = std::numeric_limits<std::uint64_t>::max();

// Undirected simple graph on identifiers {0, ..., n-1} with a declared degree
// bound. Adjacency is stored in CSR form with every list sorted ascending, so
// two graphs with the same edge set compare equal and serialize identically.
class LabeledGraph {
 public:
  LabeledGraph() = default;

  // Throws InvalidArgument on loops, duplicates, out-of-range endpoints or a
  // degree above `delta`.
  LabeledGraph(std::uint64_t n, std::uint64_t delta, std::vector<Edge> edges)
      : n_(n), delta_(delta) {
    for (auto& [u, v] : edges) {
      if (u >= n || v >= n) {
        throw InvalidArgument("edge {" + std::to_string(u) + "," + std::to_string(v) +
                              "} out of range for n=" + std::to_string(n));
      }
      if (u == v) throw InvalidArgument("self-loop at " + std::to_string(u));
      if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
      throw InvalidArgument("duplicate edge");
    }
    std::vector<std::uint64_t> deg(n, 0);
    for (const auto& [u, v] : edges) {
      ++deg[u];
      ++deg[v];
    }
    offsets_.assign(n + 1, 0);
    for (std::uint64_t v = 0; v < n; ++v) {
      if (deg[v] > delta) {
        throw InvalidArgument("vertex " + std::to_string(v) + " has degree " +
                              std::to_string(deg[v]) + " > delta " + std::to_string(delta));
      }
      offsets_[v + 1] = offsets_[v] + deg[v];
    }
    targets_.resize(offsets_[n]);
    std::vector<std::uint64_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [u, v] : edges) {
      targets_[fill[u]++] = v;
      targets_[fill[v]++] = u;
    }
    for (std::uint64_t v = 0; v < n; ++v) {
      std::sort(targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
                targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]));
    }
  }

  std::uint64_t order() const { return n_; }
  std::uint64_t delta() const { return delta_; }
  std::uint64_t edge_count() const { return targets_.size() / 2; }

  std::span<const Vertex> neighbors(Vertex v) const {
    check(v);
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }

  std::uint64_t degree(Vertex v) const {
    check(v);
    return offsets_[v + 1] - offsets_[v];
  }

  std::uint64_t max_degree() const {
    std::uint64_t best = 0;
    for (Vertex v = 0; v < n_; ++v) best = std::max(best, degree(v));
    return best;
  }

  bool has_edge(Vertex u, Vertex v) const {
    if (u >= n_ || v >= n_) return false;
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  // Edges with u < v in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (Vertex u = 0; u < n_; ++u) {
      for (Vertex v : neighbors(u)) {
        if (u < v) out.emplace_back(u, v);
      }
    }
    return out;
  }

  // Graph in which vertex v carries identifier perm[v].
  LabeledGraph relabel(std::span<const Vertex> perm) const {
    if (perm.size() != n_) throw InvalidArgument("relabel: permutation size mismatch");
    std::vector<bool> seen(n_, false);
    for (Vertex x : perm) {
      if (x >= n_ || seen[x]) throw InvalidArgument("relabel: not a permutation");
      seen[x] = true;
    }
    std::vector<Edge> es = edges();
    for (auto& [u, v] : es) {
      u = perm[u];
      v = perm[v];
    }
    return LabeledGraph(n_, delta_, std::move(es));
  }

  bool operator==(const LabeledGraph& other) const {
    return n_ == other.n_ && delta_ == other.delta_ && offsets_ == other.offsets_ &&
           targets_ == other.targets_;
  }

 private:
  void check(Vertex v) const {
    if (v >= n_) {
      throw InvalidArgument("vertex " + std::to_string(v) + " out of range for n=" +
                            std::to_string(n_));
    }
  }

  std::uint64_t n_ = 0;
  std::uint64_t delta_ = 0;
  std::vector<std::uint64_t> offsets_{0};
  std::vector<Vertex> targets_;
};

inline std::vector<std::uint64_t> bfs_distances(const LabeledGraph& g, Vertex source) {
  std::vector<std::uint64_t> dist(g.order(), kUnreachable);
  std::deque<Vertex> queue{source};
  dist.at(source) = 0;
  while (!queue.empty()) {
    Vertex u = queue.front();
    queue.pop_front();
    for (Vertex w : g.neighbors(u)) {
      if (dist[w] == kUnreachable) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

// Shortest cycle length, nullopt for forests. BFS from every root; the first
// non-tree edge seen from a root closes a cycle through that root's BFS tree.
inline std::optional<std::uint64_t> girth(const LabeledGraph& g) {
  std::uint64_t best = kUnreachable;
  const std::uint64_t n = g.order();
  std::vector<std::uint64_t> dist(n);
  std::vector<Vertex> parent(n);
  for (Vertex root = 0; root < n; ++root) {
    std::fill(dist.begin(), dist.end(), kUnreachable);
    dist[root] = 0;
    parent[root] = root;
    std::deque<Vertex> queue{root};
    while (!queue.empty()) {
      Vertex u = queue.front();
      queue.pop_front();
      if (2 * dist[u] + 1 >= best) break;
      for (Vertex w : g.neighbors(u)) {
        if (dist[w] == kUnreachable) {
          dist[w] = dist[u] + 1;
          parent[w] = u;
          queue.push_back(w);
        } else if (parent[u] != w) {
          best = std::min(best, dist[u] + dist[w] + 1);
        }
      }
    }
  }
  if (best == kUnreachable) return std::nullopt;
  return best;
}

inline std::vector<std::vector<Vertex>> connected_components(const LabeledGraph& g) {
  std::vector<std::vector<Vertex>> out;
  std::vector<bool> seen(g.order(), false);
  for (Vertex s = 0; s < g.order(); ++s) {
    if (seen[s]) continue;
    std::vector<Vertex> comp{s};
    seen[s] = true;
    for (std::size_t i = 0; i < comp.size(); ++i) {
      for (Vertex w : g.neighbors(comp[i])) {
        if (!seen[w]) {
          seen[w] = true;
          comp.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

inline bool is_bipartite(const LabeledGraph& g) {
  std::vector<int> side(g.order(), -1);
  for (Vertex s = 0; s < g.order(); ++s) {
    if (side[s] >= 0) continue;
    side[s] = 0;
    std::deque<Vertex> queue{s};
    while (!queue.empty()) {
      Vertex u = queue.front();
      queue.pop_front();
      for (Vertex w : g.neighbors(u)) {
        if (side[w] < 0) {
          side[w] = 1 - side[u];
          queue.push_back(w);
        } else if (side[w] == side[u]) {
          return false;
        }
      }
    }
  }
  return true;
}

// Induced subgraph on `vertices`, compacted to {0, ..., |vertices|-1} in
// ascending order of the original identifiers. Returns the graph and the
// sorted list of original identifiers (position = new identifier).
inline std::pair<LabeledGraph, std::vector<Vertex>> induced_subgraph(
    const LabeledGraph& g, std::vector<Vertex> vertices) {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  auto index_of = [&](Vertex v) -> std::optional<Vertex> {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
    if (it == vertices.end() || *it != v) return std::nullopt;
    return static_cast<Vertex>(it - vertices.begin());
  };
  std::vector<Edge> es;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (Vertex w : g.neighbors(vertices[i])) {
      auto j = index_of(w);
      if (j && i < *j) es.emplace_back(i, *j);
    }
  }
  return {LabeledGraph(vertices.size(), g.delta(), std::move(es)), std::move(vertices)};
}

// a on {0..|a|-1}, b shifted to {|a|..|a|+|b|-1}.
inline LabeledGraph disjoint_union(const LabeledGraph& a, const LabeledGraph& b) {
  std::vector<Edge> es = a.edges();
  for (auto [u, v] : b.edges()) es.emplace_back(u + a.order(), v + a.order());
  return LabeledGraph(a.order() + b.order(), std::max(a.delta(), b.delta()), std::move(es));
}

inline LabeledGraph two_copies(const LabeledGraph& g) { return disjoint_union(g, g); }

// Copy i of vertex v is v + i*n. Edge {u,v} becomes {u, v+n} and {u+n, v}.
inline LabeledGraph double_cover(const LabeledGraph& g) {
  const std::uint64_t n = g.order();
  std::vector<Edge> es;
  for (auto [u, v] : g.edges()) {
    es.emplace_back(u, v + n);
    es.emplace_back(u + n, v);
  }
  return LabeledGraph(2 * n, g.delta(), std::move(es));
}

}  // namespace locality
