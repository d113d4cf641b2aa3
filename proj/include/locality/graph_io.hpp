#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "locality/error.hpp"
#include "locality/graph.hpp"

namespace locality {

// Plain-text graph file. Identifiers are 0-based.
//   n <count> delta <bound>
//   u v        (one line per edge, u < v, lines sorted lexicographically)
inline void write_graph(std::ostream& out, const LabeledGraph& g) {
  out << "n " << g.order() << " delta " << g.delta() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

inline std::string graph_to_string(const LabeledGraph& g) {
  std::ostringstream out;
  write_graph(out, g);
  return out.str();
}

inline LabeledGraph read_graph(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("graph file: missing header");
  std::istringstream header(line);
  std::string tag_n, tag_delta;
  std::uint64_t n = 0, delta = 0;
  if (!(header >> tag_n >> n >> tag_delta >> delta) || tag_n != "n" || tag_delta != "delta") {
    throw ParseError("graph file: header must be 'n <count> delta <bound>'");
  }
  std::string rest;
  if (header >> rest) throw ParseError("graph file: trailing tokens in header");

  std::vector<Edge> es;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::int64_t u = -1, v = -1;
    if (!(row >> u >> v) || (row >> rest)) {
      throw ParseError("graph file line " + std::to_string(line_no) + ": expected 'u v'");
    }
    if (u < 0 || v < 0) throw ParseError("graph file line " + std::to_string(line_no) + ": negative id");
    if (u >= v) throw ParseError("graph file line " + std::to_string(line_no) + ": need u < v");
    Edge e{static_cast<Vertex>(u), static_cast<Vertex>(v)};
    if (!es.empty() && !(es.back() < e)) {
      throw ParseError("graph file line " + std::to_string(line_no) +
                       ": edges not strictly sorted");
    }
    es.push_back(e);
  }
  try {
    return LabeledGraph(n, delta, std::move(es));
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("graph file: ") + e.what());
  }
}

inline LabeledGraph graph_from_string(const std::string& text) {
  std::istringstream in(text);
  return read_graph(in);
}

}  // namespace locality
