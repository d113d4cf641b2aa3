#pragma once

#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "locality/error.hpp"
#include "locality/models.hpp"
#include "locality/permutations.hpp"

namespace locality {

using Json = nlohmann::json;

inline std::string hex64(std::uint64_t x) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(x));
  return buf;
}

inline Json permutation_json(const Permutation& p) {
  Json j;
  j["family"] = p.family();
  j["N"] = p.domain_size();
  j["k"] = p.k() ? Json(*p.k()) : Json(nullptr);
  j["epsilon"] = p.epsilon() ? Json(*p.epsilon()) : Json(nullptr);
  j["seed-hex"] = hex64(p.seed());
  j["declared-seed-bits"] = p.declared_seed_bits();
  return j;
}

inline Json transcript_json(const ProbeTranscript& t) {
  Json probes = Json::array();
  for (const auto& e : t.entries) probes.push_back({{"probed", e.probed}, {"neighbors", e.neighbors}});
  return probes;
}

// One record per vertex: {"id", "answer", "probes": [{"probed", "neighbors"}]}.
inline void write_transcripts(std::ostream& out, std::span<const Label> answers,
                              std::span<const ProbeTranscript> transcripts) {
  if (!transcripts.empty() && transcripts.size() != answers.size()) {
    throw InvalidArgument("answers and transcripts differ in length");
  }
  for (std::size_t v = 0; v < answers.size(); ++v) {
    Json rec;
    rec["id"] = v;
    rec["answer"] = answers[v];
    rec["probes"] = transcripts.empty() ? Json::array() : transcript_json(transcripts[v]);
    out << rec.dump() << '\n';
  }
}

struct TranscriptRecord {
  Vertex id = 0;
  Label answer = 0;
  ProbeTranscript transcript;
};

inline std::vector<TranscriptRecord> read_transcripts(std::istream& in) {
  std::vector<TranscriptRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      Json j = Json::parse(line);
      TranscriptRecord r;
      r.id = j.at("id").get<Vertex>();
      r.answer = j.at("answer").get<Label>();
      for (const auto& p : j.at("probes")) {
        r.transcript.entries.push_back(
            {p.at("probed").get<Vertex>(), p.at("neighbors").get<std::vector<Vertex>>()});
      }
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("transcript line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace locality
