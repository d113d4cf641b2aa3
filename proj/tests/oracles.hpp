#pragma once

// Independent reference computations used to derive expected values. None of
// them calls the library routine it checks.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <vector>

#include "locality/graph.hpp"

namespace oracle {

using locality::LabeledGraph;
using locality::Vertex;

inline std::vector<std::set<Vertex>> adjacency_sets(const LabeledGraph& g) {
  std::vector<std::set<Vertex>> adj(g.order());
  for (auto [u, v] : g.edges()) {
    adj[u].insert(v);
    adj[v].insert(u);
  }
  return adj;
}

// Shortest path between u and v avoiding the edge {u, v}; girth is the
// minimum over edges of that plus one.
inline std::optional<std::uint64_t> girth_by_edge_removal(const LabeledGraph& g) {
  auto adj = adjacency_sets(g);
  std::optional<std::uint64_t> best;
  for (auto [u, v] : g.edges()) {
    std::vector<std::int64_t> dist(g.order(), -1);
    std::queue<Vertex> q;
    dist[u] = 0;
    q.push(u);
    while (!q.empty()) {
      Vertex x = q.front();
      q.pop();
      for (Vertex y : adj[x]) {
        if ((x == u && y == v) || (x == v && y == u)) continue;
        if (dist[y] < 0) {
          dist[y] = dist[x] + 1;
          q.push(y);
        }
      }
    }
    if (dist[v] >= 0) {
      auto len = static_cast<std::uint64_t>(dist[v] + 1);
      if (!best || len < *best) best = len;
    }
  }
  return best;
}

inline std::uint64_t independence_number(const LabeledGraph& g) {
  const std::uint64_t n = g.order();
  std::uint64_t best = 0;
  auto edges = g.edges();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    bool ok = true;
    for (auto [u, v] : edges) {
      if ((mask >> u & 1) && (mask >> v & 1)) {
        ok = false;
        break;
      }
    }
    if (ok) best = std::max<std::uint64_t>(best, static_cast<std::uint64_t>(__builtin_popcountll(mask)));
  }
  return best;
}

inline std::uint64_t max_cut(const LabeledGraph& g) {
  const std::uint64_t n = g.order();
  std::uint64_t best = 0;
  auto edges = g.edges();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::uint64_t cut = 0;
    for (auto [u, v] : edges) cut += ((mask >> u) ^ (mask >> v)) & 1;
    best = std::max(best, cut);
  }
  return best;
}

inline bool proper_coloring(const LabeledGraph& g, const std::vector<std::int64_t>& c) {
  for (auto [u, v] : g.edges()) {
    if (c[u] == c[v]) return false;
  }
  return true;
}

inline bool maximal_independent(const LabeledGraph& g, const std::vector<std::int64_t>& s) {
  auto adj = adjacency_sets(g);
  for (Vertex v = 0; v < g.order(); ++v) {
    bool nb_in = false;
    for (Vertex w : adj[v]) nb_in = nb_in || s[w] == 1;
    if (s[v] == 1 && nb_in) return false;
    if (s[v] == 0 && !nb_in) return false;
  }
  return true;
}

// Exact law of a lazy permutation whose choices are enumerated as a tree:
// `run(tape)` executes the sampler with a choice source that replays `tape`
// and appends 0 once the tape runs out, returning the bounds it used and the
// resulting permutation. Leaves are weighted by prod(1/bound).
struct TapeRun {
  std::vector<std::uint64_t> bounds;
  std::vector<std::uint64_t> perm;
};

template <class Run>
std::map<std::vector<std::uint64_t>, long double> enumerate_tapes(Run&& run) {
  std::map<std::vector<std::uint64_t>, long double> law;
  std::vector<std::uint64_t> tape;
  for (;;) {
    TapeRun r = run(tape);
    long double p = 1;
    for (auto b : r.bounds) p /= static_cast<long double>(b);
    law[r.perm] += p;
    tape.resize(r.bounds.size());
    // Odometer: advance the last position that still has room.
    std::size_t i = tape.size();
    while (i > 0 && tape[i - 1] + 1 >= r.bounds[i - 1]) --i;
    if (i == 0) break;
    ++tape[i - 1];
    tape.resize(i);
  }
  return law;
}

}  // namespace oracle
