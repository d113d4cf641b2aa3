#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "locality/error.hpp"
#include "locality/graph.hpp"
#include "locality/rng.hpp"

namespace locality {

inline constexpr int kRandomRegularAttempts = 10000;

inline LabeledGraph cycle_graph(std::uint64_t n) {
  if (n < 3) throw InvalidArgument("cycle needs n >= 3");
  std::vector<Edge> es;
  for (Vertex v = 0; v < n; ++v) es.emplace_back(v, (v + 1) % n);
  return LabeledGraph(n, 2, std::move(es));
}

inline LabeledGraph path_graph(std::uint64_t n) {
  if (n < 1) throw InvalidArgument("path needs n >= 1");
  std::vector<Edge> es;
  for (Vertex v = 0; v + 1 < n; ++v) es.emplace_back(v, v + 1);
  return LabeledGraph(n, 2, std::move(es));
}

inline LabeledGraph isolated_graph(std::uint64_t n) { return LabeledGraph(n, 0, {}); }

// Two disjoint paths a0-a1-a2 and b0-b1-b2 on n vertices, the rest isolated.
inline LabeledGraph two_path_graph(std::uint64_t n, const std::array<Vertex, 3>& a,
                                   const std::array<Vertex, 3>& b) {
  if (n < 6) throw InvalidArgument("two-path needs n >= 6");
  return LabeledGraph(n, 2, {{a[0], a[1]}, {a[1], a[2]}, {b[0], b[1]}, {b[1], b[2]}});
}

// Without a seed the paths are 0-1-2 and 3-4-5; with a seed the six path
// vertices are a uniformly random ordered 6-subset of [n].
inline LabeledGraph two_path_graph(std::uint64_t n, std::optional<std::uint64_t> seed = {}) {
  if (n < 6) throw InvalidArgument("two-path needs n >= 6");
  if (!seed) return two_path_graph(n, {0, 1, 2}, {3, 4, 5});
  std::vector<Vertex> ids(n);
  std::iota(ids.begin(), ids.end(), Vertex{0});
  Rng rng(derive_seed(*seed, "two-path", 0));
  std::shuffle(ids.begin(), ids.end(), rng);
  return two_path_graph(n, {ids[0], ids[1], ids[2]}, {ids[3], ids[4], ids[5]});
}

// Configuration model with rejection of loops and multi-edges.
inline LabeledGraph random_regular_graph(std::uint64_t n, std::uint64_t d, std::uint64_t seed,
                                         int attempts = kRandomRegularAttempts) {
  if ((n * d) % 2 != 0) throw InvalidArgument("random-regular needs n*d even");
  if (d > 0 && d >= n) throw InvalidArgument("random-regular needs d < n");
  std::vector<Vertex> points;
  points.reserve(n * d);
  for (Vertex v = 0; v < n; ++v) {
    for (std::uint64_t i = 0; i < d; ++i) points.push_back(v);
  }
  for (int attempt = 0; attempt < attempts; ++attempt) {
    Rng rng(derive_seed(seed, "random-regular", static_cast<std::uint64_t>(attempt)));
    std::shuffle(points.begin(), points.end(), rng);
    std::vector<Edge> es;
    bool ok = true;
    for (std::size_t i = 0; i < points.size() && ok; i += 2) {
      Vertex u = std::min(points[i], points[i + 1]);
      Vertex v = std::max(points[i], points[i + 1]);
      if (u == v) ok = false;
      es.emplace_back(u, v);
    }
    if (!ok) continue;
    std::sort(es.begin(), es.end());
    if (std::adjacent_find(es.begin(), es.end()) != es.end()) continue;
    return LabeledGraph(n, d, std::move(es));
  }
  throw SamplingExhausted("random-regular: no simple graph after " + std::to_string(attempts) +
                          " attempts");
}

struct HighGirthSample {
  LabeledGraph graph;
  std::uint64_t rejections = 0;
};

// Rejection over configuration-model draws. Each draw counts against the same
// budget whether it failed for a loop/multi-edge or for a short cycle.
inline HighGirthSample sample_high_girth_regular(std::uint64_t n, std::uint64_t d,
                                                 std::uint64_t min_girth, std::uint64_t seed,
                                                 int attempts = kRandomRegularAttempts) {
  if (d < 2) throw InvalidArgument("high-girth sampling needs d >= 2");
  if ((n * d) % 2 != 0 || d >= n) throw InvalidArgument("no d-regular graph on n vertices");
  std::uint64_t rejections = 0;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    std::uint64_t s = derive_seed(seed, "high-girth", static_cast<std::uint64_t>(attempt));
    LabeledGraph g;
    try {
      g = random_regular_graph(n, d, s, 1);
    } catch (const SamplingExhausted&) {
      ++rejections;
      continue;
    }
    auto gg = girth(g);
    if (!gg || *gg >= min_girth) return {std::move(g), rejections};
    ++rejections;
  }
  throw SamplingExhausted("high-girth: no " + std::to_string(d) + "-regular graph on " +
                          std::to_string(n) + " vertices with girth >= " +
                          std::to_string(min_girth) + " after " + std::to_string(attempts) +
                          " attempts");
}

// Textual graph spec. Grammar:
//   cycle:N | path:N | isolated:N | two-path:N[:SEED] | random-regular:N:D[:SEED]
//   | high-girth:N:D:G[:SEED] | double-cover(S) | two-copies(S) | union(S,S) | pad:N(S)
struct GraphSpec {
  enum class Kind {
    cycle, path, isolated, two_path, random_regular, high_girth,
    double_cover, two_copies, disjoint_union, padding
  };
  Kind kind = Kind::cycle;
  std::uint64_t n = 0;
  std::uint64_t d = 0;
  std::uint64_t min_girth = 0;
  std::optional<std::uint64_t> seed;
  std::vector<GraphSpec> children;

  static GraphSpec parse(std::string_view text) {
    std::size_t pos = 0;
    GraphSpec spec = parse_at(text, pos);
    if (pos != text.size()) throw ParseError("trailing characters in graph spec: " + std::string(text));
    return spec;
  }

  std::string to_string() const {
    auto seed_suffix = [&] { return seed ? ":" + std::to_string(*seed) : std::string(); };
    switch (kind) {
      case Kind::cycle: return "cycle:" + std::to_string(n);
      case Kind::path: return "path:" + std::to_string(n);
      case Kind::isolated: return "isolated:" + std::to_string(n);
      case Kind::two_path: return "two-path:" + std::to_string(n) + seed_suffix();
      case Kind::random_regular:
        return "random-regular:" + std::to_string(n) + ":" + std::to_string(d) + seed_suffix();
      case Kind::high_girth:
        return "high-girth:" + std::to_string(n) + ":" + std::to_string(d) + ":" +
               std::to_string(min_girth) + seed_suffix();
      case Kind::double_cover: return "double-cover(" + children[0].to_string() + ")";
      case Kind::two_copies: return "two-copies(" + children[0].to_string() + ")";
      case Kind::disjoint_union:
        return "union(" + children[0].to_string() + "," + children[1].to_string() + ")";
      case Kind::padding: return "pad:" + std::to_string(n) + "(" + children[0].to_string() + ")";
    }
    return {};
  }

 private:
  static std::uint64_t parse_number(std::string_view text, std::size_t& pos) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
    if (ec != std::errc() || ptr == text.data() + pos) {
      throw ParseError("expected number at offset " + std::to_string(pos) + " in " +
                       std::string(text));
    }
    pos = static_cast<std::size_t>(ptr - text.data());
    return value;
  }

  static void expect(std::string_view text, std::size_t& pos, char c) {
    if (pos >= text.size() || text[pos] != c) {
      throw ParseError(std::string("expected '") + c + "' at offset " + std::to_string(pos) +
                       " in " + std::string(text));
    }
    ++pos;
  }

  static bool accept(std::string_view text, std::size_t& pos, char c) {
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  static GraphSpec parse_at(std::string_view text, std::size_t& pos) {
    std::size_t start = pos;
    while (pos < text.size() && (std::isalpha(static_cast<unsigned char>(text[pos])) ||
                                 text[pos] == '-')) {
      ++pos;
    }
    std::string_view word = text.substr(start, pos - start);
    GraphSpec spec;
    auto child = [&] {
      expect(text, pos, '(');
      spec.children.push_back(parse_at(text, pos));
    };
    if (word == "cycle" || word == "path" || word == "isolated") {
      spec.kind = word == "cycle" ? Kind::cycle : word == "path" ? Kind::path : Kind::isolated;
      expect(text, pos, ':');
      spec.n = parse_number(text, pos);
    } else if (word == "two-path") {
      spec.kind = Kind::two_path;
      expect(text, pos, ':');
      spec.n = parse_number(text, pos);
      if (accept(text, pos, ':')) spec.seed = parse_number(text, pos);
    } else if (word == "random-regular") {
      spec.kind = Kind::random_regular;
      expect(text, pos, ':');
      spec.n = parse_number(text, pos);
      expect(text, pos, ':');
      spec.d = parse_number(text, pos);
      if (accept(text, pos, ':')) spec.seed = parse_number(text, pos);
    } else if (word == "high-girth") {
      spec.kind = Kind::high_girth;
      expect(text, pos, ':');
      spec.n = parse_number(text, pos);
      expect(text, pos, ':');
      spec.d = parse_number(text, pos);
      expect(text, pos, ':');
      spec.min_girth = parse_number(text, pos);
      if (accept(text, pos, ':')) spec.seed = parse_number(text, pos);
    } else if (word == "double-cover" || word == "two-copies") {
      spec.kind = word == "double-cover" ? Kind::double_cover : Kind::two_copies;
      child();
      expect(text, pos, ')');
    } else if (word == "union") {
      spec.kind = Kind::disjoint_union;
      child();
      expect(text, pos, ',');
      spec.children.push_back(parse_at(text, pos));
      expect(text, pos, ')');
    } else if (word == "pad") {
      spec.kind = Kind::padding;
      expect(text, pos, ':');
      spec.n = parse_number(text, pos);
      child();
      expect(text, pos, ')');
    } else {
      throw ParseError("unknown graph kind '" + std::string(word) + "'");
    }
    return spec;
  }
};

inline LabeledGraph generate(const GraphSpec& spec) {
  using Kind = GraphSpec::Kind;
  switch (spec.kind) {
    case Kind::cycle: return cycle_graph(spec.n);
    case Kind::path: return path_graph(spec.n);
    case Kind::isolated: return isolated_graph(spec.n);
    case Kind::two_path: return two_path_graph(spec.n, spec.seed);
    case Kind::random_regular: return random_regular_graph(spec.n, spec.d, spec.seed.value_or(0));
    case Kind::high_girth:
      return sample_high_girth_regular(spec.n, spec.d, spec.min_girth, spec.seed.value_or(0)).graph;
    case Kind::double_cover: return double_cover(generate(spec.children.at(0)));
    case Kind::two_copies: return two_copies(generate(spec.children.at(0)));
    case Kind::disjoint_union:
      return disjoint_union(generate(spec.children.at(0)), generate(spec.children.at(1)));
    case Kind::padding: {
      LabeledGraph inner = generate(spec.children.at(0));
      if (spec.n < inner.order()) throw InvalidArgument("pad: target order below graph order");
      return disjoint_union(inner, isolated_graph(spec.n - inner.order()));
    }
  }
  throw InvalidArgument("unknown graph kind");
}

inline LabeledGraph generate(std::string_view spec) { return generate(GraphSpec::parse(spec)); }

}  // namespace locality
