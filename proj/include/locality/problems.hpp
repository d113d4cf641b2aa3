#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "locality/error.hpp"
#include "locality/graph.hpp"

namespace locality {

using Label = std::int64_t;

// Maximal matching labels are partner ids; -1 marks an unmatched vertex.
inline constexpr Label kUnmatched = -1;
// Returned by algorithms that detect an input outside their graph class.
inline constexpr Label kErrorLabel = -1;

enum class ProblemId {
  coloring3_cycle,
  coloring_deltaplus1,
  mis,
  maximal_matching,
  two_path_leader,
  independent_set_value,
  max_cut_value,
};

inline std::string_view to_string(ProblemId p) {
  switch (p) {
    case ProblemId::coloring3_cycle: return "coloring3-cycle";
    case ProblemId::coloring_deltaplus1: return "coloring-deltaplus1";
    case ProblemId::mis: return "mis";
    case ProblemId::maximal_matching: return "maximal-matching";
    case ProblemId::two_path_leader: return "two-path-leader";
    case ProblemId::independent_set_value: return "independent-set-value";
    case ProblemId::max_cut_value: return "max-cut-value";
  }
  return "?";
}

inline ProblemId parse_problem(std::string_view name) {
  for (auto p : {ProblemId::coloring3_cycle, ProblemId::coloring_deltaplus1, ProblemId::mis,
                 ProblemId::maximal_matching, ProblemId::two_path_leader,
                 ProblemId::independent_set_value, ProblemId::max_cut_value}) {
    if (to_string(p) == name) return p;
  }
  throw InvalidArgument("unknown problem '" + std::string(name) + "'");
}

struct Verdict {
  bool valid = false;
  std::string reason;                    // empty when valid
  std::optional<std::uint64_t> value;    // objective for the *-value problems
  std::optional<std::uint64_t> optimum;  // exact optimum when n <= kExactOptimumLimit
};

inline constexpr std::uint64_t kExactOptimumLimit = 20;

// Size of a maximum independent set. Branching on bitmasks, n <= 64.
inline std::uint64_t max_independent_set_size(const LabeledGraph& g) {
  const std::uint64_t n = g.order();
  if (n > 64) throw ScaleGuard("exact independent set limited to n <= 64");
  std::vector<std::uint64_t> adj(n, 0);
  for (Vertex v = 0; v < n; ++v) {
    for (Vertex w : g.neighbors(v)) adj[v] |= std::uint64_t{1} << w;
  }
  auto solve = [&](auto&& self, std::uint64_t p) -> std::uint64_t {
    if (p == 0) return 0;
    // A vertex of degree <= 1 inside p is always in some maximum set.
    int best_v = -1;
    int best_deg = -1;
    for (std::uint64_t rest = p; rest; rest &= rest - 1) {
      int v = std::countr_zero(rest);
      int deg = std::popcount(adj[v] & p);
      if (deg <= 1) return 1 + self(self, p & ~(adj[v] | (std::uint64_t{1} << v)));
      if (deg > best_deg) {
        best_deg = deg;
        best_v = v;
      }
    }
    std::uint64_t bit = std::uint64_t{1} << best_v;
    return std::max(self(self, p & ~bit), 1 + self(self, p & ~(adj[best_v] | bit)));
  };
  std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  return solve(solve, all);
}

// Number of edges in a maximum cut. Gray-code walk over the 2^(n-1) cuts that
// keep the last vertex on side 0; each step updates the cut size in O(deg).
inline std::uint64_t max_cut_size(const LabeledGraph& g) {
  const std::uint64_t n = g.order();
  if (n > 28) throw ScaleGuard("exact max cut limited to n <= 28");
  if (n <= 1) return 0;
  std::vector<std::uint8_t> side(n, 0);
  std::int64_t cut = 0;
  std::int64_t best = 0;
  const std::uint64_t steps = std::uint64_t{1} << (n - 1);
  for (std::uint64_t i = 1; i < steps; ++i) {
    const Vertex v = static_cast<Vertex>(std::countr_zero(i));
    std::int64_t same = 0, other = 0;
    for (Vertex w : g.neighbors(v)) (side[w] == side[v] ? same : other)++;
    cut += same - other;
    side[v] ^= 1;
    best = std::max(best, cut);
  }
  return static_cast<std::uint64_t>(best);
}

inline Verdict verify_solution(ProblemId problem, const LabeledGraph& g,
                               std::span<const Label> labels) {
  const std::uint64_t n = g.order();
  if (labels.size() != n) {
    throw InvalidArgument("labeling has " + std::to_string(labels.size()) +
                          " entries for a graph of order " + std::to_string(n));
  }
  auto fail = [](std::string why) { return Verdict{false, std::move(why), {}, {}}; };
  auto binary = [&]() -> std::optional<Verdict> {
    for (Vertex v = 0; v < n; ++v) {
      if (labels[v] != 0 && labels[v] != 1) {
        return fail("label of " + std::to_string(v) + " is not 0/1");
      }
    }
    return std::nullopt;
  };
  auto independent = [&]() -> std::optional<Verdict> {
    for (auto [u, v] : g.edges()) {
      if (labels[u] == 1 && labels[v] == 1) {
        return fail("adjacent " + std::to_string(u) + "," + std::to_string(v) + " both selected");
      }
    }
    return std::nullopt;
  };
  auto proper = [&](Label colors) -> std::optional<Verdict> {
    for (Vertex v = 0; v < n; ++v) {
      if (labels[v] < 0 || labels[v] >= colors) {
        return fail("color of " + std::to_string(v) + " outside [0," + std::to_string(colors) + ")");
      }
    }
    for (auto [u, v] : g.edges()) {
      if (labels[u] == labels[v]) {
        return fail("adjacent " + std::to_string(u) + "," + std::to_string(v) + " share a color");
      }
    }
    return std::nullopt;
  };

  switch (problem) {
    case ProblemId::coloring3_cycle:
      if (auto bad = proper(3)) return *bad;
      return {true, {}, {}, {}};
    case ProblemId::coloring_deltaplus1:
      if (auto bad = proper(static_cast<Label>(g.delta()) + 1)) return *bad;
      return {true, {}, {}, {}};
    case ProblemId::mis: {
      if (auto bad = binary()) return *bad;
      if (auto bad = independent()) return *bad;
      for (Vertex v = 0; v < n; ++v) {
        if (labels[v] == 1) continue;
        auto nb = g.neighbors(v);
        if (std::none_of(nb.begin(), nb.end(), [&](Vertex w) { return labels[w] == 1; })) {
          return fail("vertex " + std::to_string(v) + " could be added");
        }
      }
      return {true, {}, {}, {}};
    }
    case ProblemId::maximal_matching: {
      for (Vertex v = 0; v < n; ++v) {
        Label p = labels[v];
        if (p == kUnmatched) continue;
        if (p < 0 || !g.has_edge(v, static_cast<Vertex>(p))) {
          return fail("partner of " + std::to_string(v) + " is not a neighbor");
        }
        if (labels[static_cast<Vertex>(p)] != static_cast<Label>(v)) {
          return fail("partner of " + std::to_string(v) + " does not point back");
        }
      }
      for (auto [u, v] : g.edges()) {
        if (labels[u] == kUnmatched && labels[v] == kUnmatched) {
          return fail("edge " + std::to_string(u) + "," + std::to_string(v) + " could be added");
        }
      }
      return {true, {}, {}, {}};
    }
    case ProblemId::two_path_leader: {
      if (auto bad = binary()) return *bad;
      std::uint64_t leaders = 0;
      for (Vertex v = 0; v < n; ++v) {
        if (labels[v] != 1) continue;
        ++leaders;
        if (g.degree(v) != 2) return fail("leader " + std::to_string(v) + " is not a middle vertex");
      }
      if (leaders != 1) return fail(std::to_string(leaders) + " leaders");
      return {true, {}, {}, {}};
    }
    case ProblemId::independent_set_value: {
      if (auto bad = binary()) return *bad;
      if (auto bad = independent()) return *bad;
      Verdict v{true, {}, static_cast<std::uint64_t>(std::count(labels.begin(), labels.end(), 1)), {}};
      if (n <= kExactOptimumLimit) v.optimum = max_independent_set_size(g);
      return v;
    }
    case ProblemId::max_cut_value: {
      if (auto bad = binary()) return *bad;
      std::uint64_t cut = 0;
      for (auto [u, v] : g.edges()) cut += labels[u] != labels[v];
      Verdict v{true, {}, cut, {}};
      if (n <= kExactOptimumLimit) v.optimum = max_cut_size(g);
      return v;
    }
  }
  throw InvalidArgument("unknown problem");
}

}  // namespace locality
