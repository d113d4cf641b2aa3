#pragma once

// Experiment runner behind the locality_lab command line. Every command maps
// a validated config onto a JSON report plus a CSV mirror; all randomness is
// derived from the master seed with derive_seed(seed, module, index).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "locality/algorithms.hpp"
#include "locality/error.hpp"
#include "locality/generators.hpp"
#include "locality/graph_io.hpp"
#include "locality/lowerbounds.hpp"
#include "locality/permutations.hpp"
#include "locality/problems.hpp"
#include "locality/rng.hpp"
#include "locality/serialize.hpp"
#include "locality/simulation.hpp"

namespace locality {

struct FamilyConfig {
  std::string kind = "kwise";
  std::optional<std::uint64_t> k;
  std::optional<double> eps;
};

struct ExperimentConfig {
  std::string command;
  std::string graph;
  std::string alg;
  std::string tree = "all";
  std::optional<std::uint64_t> t;
  std::uint64_t delta = 2;
  std::string n_rule = "n^4";
  std::string h = "default";
  FamilyConfig family;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  std::string mode;
  std::uint64_t samples = 100000;
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> N;
  std::optional<std::uint64_t> k;
  std::vector<std::uint64_t> n_values{10, 50, 100, 200};
  std::uint64_t max_retries = 1;
  std::string order = "index";
  std::string out;
};

inline const std::vector<std::string>& command_ids() {
  static const std::vector<std::string> ids{
      "gen-graph", "run-local", "run-lca", "run-partree", "localize", "estimate-failure",
      "derandomize-search", "lowerbound", "perm-test", "two-path-gap"};
  return ids;
}

namespace detail {

template <class T>
T field(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(std::string("config field '") + key + "' has the wrong type");
  }
}

inline void require_one_of(const std::string& key, const std::string& value,
                           std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (value == a) return;
  }
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : "|") + a;
  throw SchemaError("config field '" + key + "' must be one of " + list + ", got '" + value + "'");
}

}  // namespace detail

inline ExperimentConfig parse_config(const Json& j) {
  using detail::field;
  if (!j.is_object()) throw SchemaError("config must be a JSON object");
  static const std::set<std::string> known{
      "command", "graph", "alg", "tree", "t", "delta", "n-rule", "h", "family", "trials", "seed",
      "mode", "samples", "n", "N", "k", "n-values", "max-retries", "order", "out"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw SchemaError("unknown config field '" + key + "'");
  }
  ExperimentConfig c;
  if (!j.contains("command")) throw SchemaError("config needs a 'command'");
  c.command = field<std::string>(j, "command");
  if (std::find(command_ids().begin(), command_ids().end(), c.command) == command_ids().end()) {
    throw SchemaError("unknown command '" + c.command + "'");
  }
  if (j.contains("graph")) c.graph = field<std::string>(j, "graph");
  if (j.contains("alg")) c.alg = field<std::string>(j, "alg");
  if (j.contains("tree")) c.tree = field<std::string>(j, "tree");
  if (j.contains("t")) c.t = field<std::uint64_t>(j, "t");
  if (j.contains("delta")) c.delta = field<std::uint64_t>(j, "delta");
  if (j.contains("n-rule")) c.n_rule = field<std::string>(j, "n-rule");
  if (j.contains("h")) c.h = field<std::string>(j, "h");
  if (j.contains("family")) {
    const Json& f = j.at("family");
    if (!f.is_object()) throw SchemaError("config field 'family' must be an object");
    for (const auto& [key, value] : f.items()) {
      if (key != "kind" && key != "k" && key != "eps") {
        throw SchemaError("unknown family field '" + key + "'");
      }
    }
    if (f.contains("kind")) c.family.kind = field<std::string>(f, "kind");
    if (f.contains("k") && !f.at("k").is_null()) c.family.k = field<std::uint64_t>(f, "k");
    if (f.contains("eps") && !f.at("eps").is_null()) c.family.eps = field<double>(f, "eps");
  }
  if (j.contains("trials")) c.trials = field<std::uint64_t>(j, "trials");
  if (j.contains("seed")) c.seed = field<std::uint64_t>(j, "seed");
  if (j.contains("mode")) c.mode = field<std::string>(j, "mode");
  if (j.contains("samples")) c.samples = field<std::uint64_t>(j, "samples");
  if (j.contains("n")) c.n = field<std::uint64_t>(j, "n");
  if (j.contains("N")) c.N = field<std::uint64_t>(j, "N");
  if (c.N && !j.contains("n-rule")) c.n_rule = "explicit";
  if (j.contains("k")) c.k = field<std::uint64_t>(j, "k");
  if (j.contains("n-values")) c.n_values = field<std::vector<std::uint64_t>>(j, "n-values");
  if (j.contains("max-retries")) c.max_retries = field<std::uint64_t>(j, "max-retries");
  if (j.contains("order")) c.order = field<std::string>(j, "order");
  if (j.contains("out")) c.out = field<std::string>(j, "out");

  detail::require_one_of("h", c.h, {"default", "empty", "cycle"});
  detail::require_one_of("family.kind", c.family.kind, {"kwise", "explicit", "lazy", "identity"});
  detail::require_one_of("order", c.order, {"index", "shuffled"});
  if (!c.mode.empty()) detail::require_one_of("mode", c.mode, {"exact", "sampled", "exhaustive"});
  if (c.n_rule != "n^4" && c.n_rule != "explicit") {
    throw SchemaError("config field 'n-rule' must be n^4 or explicit");
  }
  if (c.n_rule == "explicit" && !c.N) throw SchemaError("n-rule explicit needs 'N'");
  if (c.trials < 1) throw SchemaError("'trials' must be >= 1");
  if (c.max_retries < 1) throw SchemaError("'max-retries' must be >= 1");

  const bool needs_graph = c.command == "gen-graph" || c.command == "run-local" ||
                           c.command == "run-lca" || c.command == "run-partree" ||
                           c.command == "localize" || c.command == "estimate-failure" ||
                           c.command == "lowerbound";
  if (needs_graph && c.graph.empty()) throw SchemaError(c.command + " needs 'graph'");
  const bool needs_alg = c.command == "run-local" || c.command == "run-lca" ||
                         c.command == "derandomize-search";
  if (needs_alg && c.alg.empty()) throw SchemaError(c.command + " needs 'alg'");
  if (c.command == "derandomize-search" && (!c.n || !c.N)) {
    throw SchemaError("derandomize-search needs 'n' and 'N'");
  }
  if (c.command == "perm-test" && (!c.N || !c.k)) throw SchemaError("perm-test needs 'N' and 'k'");
  if (c.command == "lowerbound" && !c.t) throw SchemaError("lowerbound needs 't'");
  return c;
}

// Canonical form: every field, defaults included, in sorted key order.
inline Json config_json(const ExperimentConfig& c) {
  Json j;
  j["command"] = c.command;
  j["graph"] = c.graph;
  j["alg"] = c.alg;
  j["tree"] = c.tree;
  j["t"] = c.t ? Json(*c.t) : Json(nullptr);
  j["delta"] = c.delta;
  j["n-rule"] = c.n_rule;
  j["h"] = c.h;
  j["family"] = {{"kind", c.family.kind},
                 {"k", c.family.k ? Json(*c.family.k) : Json(nullptr)},
                 {"eps", c.family.eps ? Json(*c.family.eps) : Json(nullptr)}};
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["mode"] = c.mode;
  j["samples"] = c.samples;
  j["n"] = c.n ? Json(*c.n) : Json(nullptr);
  j["N"] = c.N ? Json(*c.N) : Json(nullptr);
  j["k"] = c.k ? Json(*c.k) : Json(nullptr);
  j["n-values"] = c.n_values;
  j["max-retries"] = c.max_retries;
  j["order"] = c.order;
  j["out"] = c.out;
  return j;
}

inline std::string config_hash(const ExperimentConfig& c) { return hex64(fnv1a64(config_json(c).dump())); }

struct CommandResult {
  Json report;
  std::string csv;
  std::vector<std::pair<std::string, std::string>> files;  // suffix, contents
  std::optional<std::string> failed_check;
};

namespace detail {

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string> header) { row(std::vector<std::string>(header)); }
  template <class... Ts>
  void add(const Ts&... cells) {
    std::vector<std::string> r;
    (r.push_back(cell(cells)), ...);
    row(r);
  }
  std::string str() const { return out_.str(); }

 private:
  template <class T>
  static std::string cell(const T& v) {
    if constexpr (std::is_same_v<T, std::string>) {
      return v;
    } else if constexpr (std::is_same_v<T, bool>) {
      return v ? "true" : "false";
    } else if constexpr (std::is_convertible_v<T, const char*>) {
      return v;
    } else {
      return Json(v).dump();
    }
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out_ << (i ? "," : "");
      if (cells[i].find_first_of(",\"") == std::string::npos) {
        out_ << cells[i];
        continue;
      }
      out_ << '"';
      for (char ch : cells[i]) out_ << (ch == '"' ? "\"\"" : std::string(1, ch));
      out_ << '"';
    }
    out_ << '\n';
  }
  std::ostringstream out_;
};

inline Json seed_bits_json(std::uint64_t algorithm_bits, std::uint64_t family_bits) {
  return {{"algorithm-bits", algorithm_bits},
          {"family-bits", family_bits},
          {"total-bits", algorithm_bits + family_bits}};
}

inline Json verdict_json(const Verdict& v) {
  Json j{{"valid", v.valid}, {"reason", v.reason}};
  j["value"] = v.value ? Json(*v.value) : Json(nullptr);
  j["optimum"] = v.optimum ? Json(*v.optimum) : Json(nullptr);
  return j;
}

inline std::optional<Json> verify_json(const std::string& alg, const LabeledGraph& g,
                                       std::span<const Label> labels) {
  auto problem = problem_of(alg);
  if (!problem) return std::nullopt;
  Json j = verdict_json(verify_solution(*problem, g, labels));
  j["problem"] = std::string(to_string(*problem));
  return j;
}

inline HSpec h_for(const ExperimentConfig& c) {
  if (c.h == "empty") return HSpec::empty();
  if (c.h == "cycle") return HSpec::cycle();
  // Cycle problems get a cycle as H, everything else the empty graph.
  return c.alg == "coloring3" ? HSpec::cycle() : HSpec::empty();
}

inline std::unique_ptr<PermutationFamily> family_for(const FamilyConfig& f, std::uint64_t N,
                                                     std::uint64_t k, double eps) {
  if (f.kind == "explicit") return std::make_unique<ExplicitFamily>(N);
  if (f.kind == "lazy") return std::make_unique<LazyFamily>(N);
  if (f.kind == "identity") return std::make_unique<IdentityFamily>(N);
  return std::make_unique<KwiseFamily>(N, f.k.value_or(k), f.eps.value_or(eps));
}

inline Json certificate_json(const QueryCertificate& c) {
  return {{"query", c.query},
          {"success", c.success},
          {"probes", c.probes},
          {"radius", c.locality.radius},
          {"within-radius", c.locality.within_radius},
          {"connected", c.locality.connected},
          {"passes", c.passes()}};
}

// "file:PATH" reads a graph file; anything else is a generator spec.
inline LabeledGraph load_graph(const std::string& source) {
  if (source.rfind("file:", 0) == 0) {
    const std::string path = source.substr(5);
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot read graph file " + path);
    return read_graph(in);
  }
  return generate(source);
}

inline CommandResult gen_graph(const ExperimentConfig& c) {
  auto g = load_graph(c.graph);
  CommandResult r;
  auto gi = girth(g);
  r.report = {{"n", g.order()},
              {"delta", g.delta()},
              {"edges", g.edge_count()},
              {"max-degree", g.max_degree()},
              {"girth", gi ? Json(*gi) : Json(nullptr)},
              {"components", connected_components(g).size()},
              {"bipartite", is_bipartite(g)},
              {"seed-bits", seed_bits_json(0, 0)}};
  Csv csv{"u", "v"};
  for (auto [u, v] : g.edges()) csv.add(u, v);
  r.csv = csv.str();
  r.files.emplace_back(".graph", graph_to_string(g));
  return r;
}

inline CommandResult run_local_cmd(const ExperimentConfig& c) {
  auto g = load_graph(c.graph);
  auto alg = make_algorithm(c.alg, c.delta, c.t.value_or(2));
  if (alg.model != Model::local) throw InvalidArgument(c.alg + " is not a LOCAL algorithm");
  const std::uint64_t rounds = c.t ? *c.t : alg.complexity(g.order());
  auto labels = run_local(alg, g, rounds);
  CommandResult r;
  r.report = {{"algorithm", alg.name}, {"n", g.order()}, {"rounds", rounds}, {"labels", labels},
              {"seed-bits", seed_bits_json(0, 0)}};
  if (auto v = verify_json(c.alg, g, labels)) r.report["verdict"] = *v;
  Csv csv{"id", "label"};
  for (Vertex v = 0; v < g.order(); ++v) csv.add(v, labels[v]);
  r.csv = csv.str();
  std::ostringstream jsonl;
  write_transcripts(jsonl, labels, {});
  r.files.emplace_back(".jsonl", jsonl.str());
  return r;
}

inline Json probe_summary(std::span<const ProbeTranscript> ts) {
  std::uint64_t total = 0, worst = 0;
  for (const auto& t : ts) {
    total += t.total_probes();
    worst = std::max(worst, t.total_probes());
  }
  return {{"total", total}, {"max", worst}};
}

inline CommandResult run_lca_cmd(const ExperimentConfig& c) {
  auto g = load_graph(c.graph);
  auto alg = make_algorithm(c.alg, c.delta, c.t.value_or(2));
  if (alg.model != Model::lca) throw InvalidArgument(c.alg + " is not an LCA algorithm");
  std::vector<Vertex> order(g.order());
  for (Vertex v = 0; v < g.order(); ++v) order[v] = v;
  if (c.order == "shuffled") {
    std::uint64_t counter = 0;
    const std::uint64_t key = derive_seed(c.seed, "query-order", 0);
    for (std::uint64_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[stream_uniform(key, counter, i)]);
  }
  auto ctx = default_context(alg, g.order(), derive_seed(c.seed, "algorithm", 0));
  if (c.t) ctx.probe_budget = *c.t;
  auto res = run_lca(alg, g, order, ctx);
  std::vector<Label> labels(g.order());
  std::vector<ProbeTranscript> transcripts(g.order());
  for (std::size_t i = 0; i < order.size(); ++i) {
    labels[order[i]] = res.answers[i];
    transcripts[order[i]] = res.transcripts[i];
  }
  CommandResult r;
  r.report = {{"algorithm", alg.name},
              {"n", g.order()},
              {"order", order},
              {"labels", labels},
              {"probe-budget", ctx.probe_budget == kNoBudget ? Json(nullptr) : Json(ctx.probe_budget)},
              {"probes", probe_summary(transcripts)},
              {"final-state-bytes", res.state_trace.empty() ? 0 : res.state_trace.back().size()},
              {"seed-bits", seed_bits_json(ctx.seed_bits, 0)}};
  if (auto v = verify_json(c.alg, g, labels)) r.report["verdict"] = *v;
  Csv csv{"id", "answer", "probes"};
  for (Vertex v = 0; v < g.order(); ++v) csv.add(v, labels[v], transcripts[v].total_probes());
  r.csv = csv.str();
  std::ostringstream jsonl;
  write_transcripts(jsonl, labels, transcripts);
  r.files.emplace_back(".jsonl", jsonl.str());
  return r;
}

inline CommandResult run_partree_cmd(const ExperimentConfig& c) {
  auto g = load_graph(c.graph);
  AlgorithmHandle tree;
  std::uint64_t budget = 0;
  if (!c.alg.empty()) {
    tree = make_algorithm(c.alg, c.delta, c.t.value_or(2));
    if (tree.model == Model::local) tree = local_to_lca(tree);
    budget = c.t ? *c.t : tree.complexity(g.order());
  } else {
    if (c.tree == "all") throw SchemaError("run-partree needs 'alg' or a single 'tree'");
    if (!c.t) throw SchemaError("run-partree with a tree needs 't'");
    tree = make_tree(c.tree, *c.t);
    budget = *c.t;
  }
  auto res = run_partree(tree, g, budget);
  CommandResult r;
  r.report = {{"algorithm", tree.name},       {"n", g.order()},
              {"budget", budget},             {"labels", res.labels},
              {"probes", probe_summary(res.transcripts)},
              {"seed-bits", seed_bits_json(0, 0)}};
  if (!c.alg.empty()) {
    if (auto v = verify_json(c.alg, g, res.labels)) r.report["verdict"] = *v;
  }
  Csv csv{"id", "answer", "probes"};
  for (Vertex v = 0; v < g.order(); ++v) csv.add(v, res.labels[v], res.transcripts[v].total_probes());
  r.csv = csv.str();
  std::ostringstream jsonl;
  write_transcripts(jsonl, res.labels, res.transcripts);
  r.files.emplace_back(".jsonl", jsonl.str());
  return r;
}

inline CommandResult localize_cmd(const ExperimentConfig& c) {
  auto g = load_graph(c.graph);
  const std::string alg_id = c.alg.empty() ? "coloring3" : c.alg;
  auto alg = make_algorithm(alg_id, c.delta, c.t.value_or(2));
  if (alg.model == Model::local) alg = local_to_lca(alg);
  ExperimentConfig cc = c;
  cc.alg = alg_id;
  const HSpec h = h_for(cc);
  LocalizeOptions opt;
  opt.eps = c.family.eps;
  opt.alg_seed = derive_seed(c.seed, "algorithm", 0);
  const auto problem = problem_of(alg_id);

  std::uint64_t failed_runs = 0, attempts = 0, certificates = 0, passed = 0, valid = 0;
  std::vector<RetriedRun> runs(c.trials);
  parallel_for(c.trials, [&](std::uint64_t i) {
    runs[i] = localize_with_retry(alg, g, h, derive_seed(c.seed, "localize-run", i), c.max_retries, opt);
  });
  Csv csv{"run", "query", "success", "answer", "probes", "radius", "connected", "passes"};
  Json per_run = Json::array();
  for (std::uint64_t i = 0; i < c.trials; ++i) {
    const auto& run = runs[i].run;
    attempts += runs[i].attempts;
    if (!run.success) ++failed_runs;
    bool run_valid = false;
    if (run.success) {
      run_valid = !problem || verify_solution(*problem, g, run.answers).valid;
      if (run_valid) ++valid;
      for (const auto& cert : run.certificates) {
        ++certificates;
        if (cert.passes()) ++passed;
      }
    }
    for (const auto& cert : run.certificates) {
      csv.add(i, cert.query, cert.success, run.answers[cert.query], cert.probes, cert.locality.radius,
              cert.locality.connected, cert.passes());
    }
    per_run.push_back({{"run", i}, {"attempts", runs[i].attempts}, {"success", run.success},
                       {"failed-queries", run.failed_queries}, {"valid", run_valid}});
  }
  const auto& first = runs.front().run;
  const auto fb = failure_bound(first.n, first.N, first.delta, first.t);
  const std::uint64_t successes = c.trials - failed_runs;
  CommandResult r;
  r.report = {
      {"algorithm", alg.name},
      {"h", h.to_string()},
      {"n", first.n},
      {"N", first.N},
      {"t", first.t},
      {"k", first.k},
      {"delta", first.delta},
      {"eps", first.eps},
      {"declared-eps", first.declared_eps},
      {"family-rounds", first.rounds},
      {"runs", c.trials},
      {"attempts", attempts},
      {"failed-runs", failed_runs},
      {"failure-rate", static_cast<double>(failed_runs) / static_cast<double>(c.trials)},
      {"per-query-bound", fb.bound},
      {"per-run-bound", std::min(1.0, static_cast<double>(first.n) * fb.bound + first.eps * static_cast<double>(first.n))},
      {"certificates", {{"checked", certificates}, {"passed", passed}}},
      {"valid-solutions", valid},
      {"small-probe-regime", small_probe_regime(first.n, first.t)},
      {"runs-detail", per_run},
      {"first-run-certificates", Json::array()},
      {"seed-bits",
       {{"algorithm-bits", first.seeds.algorithm_bits},
        {"family-bits", first.seeds.family_bits},
        {"total-bits", first.seeds.total_bits},
        {"overhead-bound", first.seeds.overhead_bound},
        {"overhead-ratio", first.seeds.overhead_ratio},
        {"overhead-within-bound", first.seeds.within}}}};
  for (const auto& cert : first.certificates) r.report["first-run-certificates"].push_back(certificate_json(cert));
  r.csv = csv.str();
  if (passed != certificates) r.failed_check = "locality certificate failed on a successful run";
  else if (valid != successes) r.failed_check = "a successful run produced an invalid solution";
  return r;
}

inline std::uint64_t resolve_N(const ExperimentConfig& c, std::uint64_t n) {
  return c.n_rule == "explicit" ? *c.N : checked_fourth_power(n);
}

inline CommandResult estimate_failure_cmd(const ExperimentConfig& c) {
  auto g = load_graph(c.graph);
  const std::uint64_t t = c.t.value_or(2);
  const std::string alg_id = c.alg.empty() ? "remote-prober" : c.alg;
  auto alg = make_algorithm(alg_id, c.delta, t);
  if (alg.model == Model::local) alg = local_to_lca(alg);
  ExperimentConfig cc = c;
  cc.alg = alg_id;
  const std::uint64_t N = resolve_N(c, g.order());
  const std::uint64_t budget = c.t ? *c.t : alg.complexity(N);
  const std::uint64_t k = detail::discovered_bound(g.delta(), budget);
  const double eps = 1.0 / static_cast<double>(g.order() * g.order());
  auto family = family_for(c.family, N, k, eps);
  auto e = estimate_failure(g, h_for(cc), N, alg, *family, c.trials, c.seed, budget);
  CommandResult r;
  r.report = {{"algorithm", alg.name},
              {"family", family->name()},
              {"family-eps", family->epsilon() ? Json(*family->epsilon()) : Json(nullptr)},
              {"n", g.order()},
              {"N", N},
              {"t", budget},
              {"k", e.bound.k},
              {"trials", e.trials},
              {"pairs", e.pairs},
              {"failures", e.failures},
              {"rate", e.rate},
              {"bound", e.bound.bound},
              {"simplified-bound", e.bound.simplified ? Json(*e.bound.simplified) : Json(nullptr)},
              {"sigma", e.sigma},
              {"tolerance", e.tolerance},
              {"within", e.within},
              {"seed-bits", seed_bits_json(alg.seed_length(N), family->seed_bits())}};
  Csv csv{"pairs", "failures", "rate", "bound", "tolerance", "within"};
  csv.add(e.pairs, e.failures, e.rate, e.bound.bound, e.tolerance, e.within);
  r.csv = csv.str();
  if (!e.within) r.failed_check = "empirical failure rate exceeds bound + 4 sigma";
  return r;
}

inline CommandResult derandomize_cmd(const ExperimentConfig& c) {
  const std::uint64_t t = c.t.value_or(1);
  auto alg = make_algorithm(c.alg, c.delta, t);
  if (alg.model == Model::local) alg = local_to_lca(alg);
  auto graphs = enumerate_graphs(*c.n, c.delta);
  auto d = derandomize_search(*c.n, *c.N, c.delta, t, alg, graphs);
  CommandResult r;
  r.report = {{"algorithm", alg.name},
              {"n", *c.n},
              {"N", *c.N},
              {"t", t},
              {"graphs", d.graphs},
              {"permutations", d.permutations},
              {"good", d.good},
              {"good-fraction", d.good_fraction},
              {"union-bound-prediction", d.union_bound_prediction},
              {"first-good", d.first_good ? Json(*d.first_good) : Json(nullptr)},
              {"seed-bits", seed_bits_json(0, log2_factorial_bits(*c.N))}};
  Csv csv{"rank", "good"};
  for (std::uint64_t i = 0; i < d.verdicts.size(); ++i) csv.add(i, static_cast<bool>(d.verdicts[i]));
  r.csv = csv.str();
  if (d.union_bound_prediction > 0 && d.good_fraction < d.union_bound_prediction) {
    r.failed_check = "good fraction below the union-bound prediction";
  }
  return r;
}

inline double chi_square(const TranscriptDistribution& a, const TranscriptDistribution& b) {
  std::set<std::string> keys;
  for (const auto& [k, v] : a.counts) keys.insert(k);
  for (const auto& [k, v] : b.counts) keys.insert(k);
  double chi = 0;
  for (const auto& key : keys) {
    const double x = a.counts.count(key) ? static_cast<double>(a.counts.at(key)) : 0.0;
    const double y = b.counts.count(key) ? static_cast<double>(b.counts.at(key)) : 0.0;
    if (x + y > 0) chi += (x - y) * (x - y) / (x + y);
  }
  return chi;
}

inline CommandResult lowerbound_cmd(const ExperimentConfig& c) {
  auto g = load_graph(c.graph);
  const std::uint64_t t = *c.t;
  const std::string mode = c.mode.empty() ? "exact" : c.mode;
  if (mode == "exhaustive") throw SchemaError("lowerbound mode must be exact or sampled");
  std::vector<std::string> trees = c.tree == "all" ? tree_ids() : std::vector<std::string>{c.tree};
  CommandResult r;
  Csv csv{"graph", "t", "tree", "query", "verdict", "witness-hash"};
  Json results = Json::array();
  bool all_equal = true;
  for (const auto& id : trees) {
    auto tree = make_tree(id, t);
    Json tj{{"tree", tree.name}};
    if (mode == "exact") {
      auto rep = indistinguishability_check(g, tree, t);
      tj["girth"] = rep.girth;
      tj["all-equal"] = rep.all_equal;
      all_equal = all_equal && rep.all_equal;
      Json qs = Json::array();
      for (const auto& q : rep.queries) {
        Json qj{{"query", q.query}, {"verdict", q.equal ? "equal" : "distinguished"}};
        if (q.witness) {
          qj["witness"] = {{"transcript", q.witness->transcript},
                           {"count-a", q.witness->count_a},
                           {"count-b", q.witness->count_b},
                           {"hash", hex64(q.witness->hash())}};
        }
        qs.push_back(qj);
        csv.add(c.graph, t, tree.name, q.query, q.equal ? "equal" : "distinguished",
                q.witness ? hex64(q.witness->hash()) : std::string());
      }
      tj["queries"] = qs;
      tj["denominator"] = std::uint64_t{1} << g.order();
    } else {
      auto pair = build_pair(g);
      SamplingOptions s{c.samples, derive_seed(c.seed, "lowerbound", 0)};
      auto da = transcript_distributions(tree, pair.a, t, DistributionMode::sampled, s);
      s.seed = derive_seed(c.seed, "lowerbound", 1);
      auto db = transcript_distributions(tree, pair.b, t, DistributionMode::sampled, s);
      Json qs = Json::array();
      for (Vertex v = 0; v < pair.a.order(); ++v) {
        const double chi = chi_square(da[v], db[v]);
        qs.push_back({{"query", v}, {"chi-square", chi},
                      {"support", std::max(da[v].counts.size(), db[v].counts.size())}});
        csv.add(c.graph, t, tree.name, v, "sampled", std::string());
      }
      tj["queries"] = qs;
    }
    results.push_back(tj);
  }
  r.report = {{"graph", c.graph}, {"n", g.order()}, {"t", t}, {"mode", mode}, {"trees", results},
              {"seed-bits", seed_bits_json(0, 0)}};
  if (mode == "exact") r.report["all-equal"] = all_equal;
  if (2 * g.order() <= kGapVertexLimit) {
    auto gap = gap_report(g);
    r.report["gap"] = {{"alpha-a", gap.alpha_a},
                       {"alpha-b", gap.alpha_b},
                       {"maxcut-a", gap.maxcut_a},
                       {"maxcut-b", gap.maxcut_b},
                       {"edges", gap.edges},
                       {"cut-fraction-a", gap.cut_fraction_a},
                       {"cut-fraction-b", gap.cut_fraction_b},
                       {"independence-ratio", gap.independence_ratio},
                       {"implied-color-bound", gap.implied_color_bound}};
  }
  r.csv = csv.str();
  return r;
}

inline CommandResult perm_test_cmd(const ExperimentConfig& c) {
  const std::uint64_t N = *c.N, k = *c.k;
  auto family = family_for(c.family, N, k, c.family.eps.value_or(0.01));
  const std::string mode = c.mode.empty() ? "exhaustive" : c.mode;
  if (mode == "exact") throw SchemaError("perm-test mode must be exhaustive or sampled");
  auto q = tuple_uniformity_test(*family, k,
                                 mode == "exhaustive" ? TupleMode::exhaustive : TupleMode::sampled,
                                 c.samples, derive_seed(c.seed, "perm-test", 0));
  auto sample = family->sample(derive_seed(c.seed, "perm-sample", 0));
  CommandResult r;
  r.report = {{"family", family->name()},
              {"N", N},
              {"k", k},
              {"mode", mode},
              {"declared-eps", q.epsilon ? Json(*q.epsilon) : Json(nullptr)},
              {"measured-distance", q.measured_distance},
              {"tuples-examined", q.tuples_examined},
              {"worst-tuple", q.worst_tuple},
              {"handle", permutation_json(*sample)},
              {"seed-bits", seed_bits_json(0, family->seed_bits())}};
  Csv csv{"family", "N", "k", "mode", "declared-eps", "measured-distance"};
  csv.add(family->name(), N, k, mode, q.epsilon ? Json(*q.epsilon).dump() : std::string(), q.measured_distance);
  r.csv = csv.str();
  if (mode == "exhaustive" && q.epsilon && q.measured_distance > *q.epsilon + 1e-12) {
    r.failed_check = "measured distance exceeds the declared epsilon";
  }
  return r;
}

}  // namespace detail

struct TwoPathWorstCase {
  std::uint64_t n = 0;
  std::uint64_t max_probes = 0;
  Vertex middle_a = 0, middle_b = 0;   // placement attaining the maximum
};

// Exhaustive over the identifiers of the two middle vertices; endpoints take
// the smallest remaining identifiers. For an algorithm that only tests
// degrees this covers every distinct probe behaviour.
inline TwoPathWorstCase two_path_worst_case(const AlgorithmHandle& alg, std::uint64_t n) {
  if (n < 6) throw InvalidArgument("two-path needs n >= 6");
  TwoPathWorstCase w;
  w.n = n;
  std::vector<std::uint64_t> best(n * n, 0);
  parallel_for(n, [&](std::uint64_t a) {
    for (Vertex b = a + 1; b < n; ++b) {
      std::vector<Vertex> rest;
      for (Vertex x = 0; x < n && rest.size() < 4; ++x) {
        if (x != a && x != b) rest.push_back(x);
      }
      auto g = two_path_graph(n, {rest[0], a, rest[1]}, {rest[2], b, rest[3]});
      auto ctx = default_context(alg, n);
      std::uint64_t worst = 0;
      for (Vertex q : {static_cast<Vertex>(a), b}) {
        std::vector<Vertex> one{q};
        auto res = run_lca(alg, g, one, ctx);
        worst = std::max(worst, res.transcripts[0].total_probes());
      }
      best[a * n + b] = worst;
    }
  });
  for (Vertex a = 0; a < n; ++a) {
    for (Vertex b = a + 1; b < n; ++b) {
      if (best[a * n + b] > w.max_probes) {
        w.max_probes = best[a * n + b];
        w.middle_a = a;
        w.middle_b = b;
      }
    }
  }
  return w;
}

struct TwoPathStatefullSummary {
  std::uint64_t instances = 0;
  std::uint64_t max_probes_per_query = 0;
  std::uint64_t min_probes_per_query = 0;
  std::uint64_t single_leader = 0;   // instances with exactly one leader
};

// Instance i has n = n_values[i % size], a seeded placement and a seeded
// query order over all vertices.
inline TwoPathStatefullSummary two_path_statefull_trials(const std::vector<std::uint64_t>& n_values,
                                                         std::uint64_t instances, std::uint64_t seed) {
  if (n_values.empty()) throw InvalidArgument("need at least one n");
  auto alg = two_path_statefull();
  TwoPathStatefullSummary s;
  s.instances = instances;
  s.min_probes_per_query = kSaturated;
  std::vector<std::uint64_t> mins(instances), maxs(instances), ok(instances);
  parallel_for(instances, [&](std::uint64_t i) {
    const std::uint64_t n = n_values[i % n_values.size()];
    auto g = two_path_graph(n, derive_seed(seed, "two-path-instance", i));
    std::vector<Vertex> order(n);
    for (Vertex v = 0; v < n; ++v) order[v] = v;
    const std::uint64_t key = derive_seed(seed, "two-path-order", i);
    std::uint64_t counter = 0;
    for (std::uint64_t j = n; j > 1; --j) std::swap(order[j - 1], order[stream_uniform(key, counter, j)]);
    auto res = run_lca(alg, g, order, default_context(alg, n));
    std::uint64_t lo = kSaturated, hi = 0, leaders = 0;
    for (std::size_t j = 0; j < order.size(); ++j) {
      lo = std::min(lo, res.transcripts[j].total_probes());
      hi = std::max(hi, res.transcripts[j].total_probes());
      if (res.answers[j] == 1) ++leaders;
    }
    mins[i] = lo;
    maxs[i] = hi;
    ok[i] = leaders == 1 && verify_solution(ProblemId::two_path_leader, g, [&] {
              std::vector<Label> labels(n);
              for (std::size_t j = 0; j < order.size(); ++j) labels[order[j]] = res.answers[j];
              return labels;
            }()).valid;
  });
  for (std::uint64_t i = 0; i < instances; ++i) {
    s.min_probes_per_query = std::min(s.min_probes_per_query, mins[i]);
    s.max_probes_per_query = std::max(s.max_probes_per_query, maxs[i]);
    s.single_leader += ok[i];
  }
  return s;
}

namespace detail {

inline CommandResult two_path_gap_cmd(const ExperimentConfig& c) {
  auto stateful = two_path_statefull_trials(c.n_values, c.trials, c.seed);
  auto baseline = two_path_stateless_baseline();
  CommandResult r;
  Csv csv{"n", "stateless-max-probes", "ratio", "middle-a", "middle-b"};
  Json rows = Json::array();
  bool linear = true;
  for (std::uint64_t n : c.n_values) {
    auto w = two_path_worst_case(baseline, n);
    const double ratio = static_cast<double>(w.max_probes) / static_cast<double>(n);
    linear = linear && ratio >= 0.5;
    rows.push_back({{"n", n}, {"max-probes", w.max_probes}, {"ratio", ratio},
                    {"middle", {w.middle_a, w.middle_b}}});
    csv.add(n, w.max_probes, ratio, w.middle_a, w.middle_b);
  }
  r.report = {{"statefull",
               {{"instances", stateful.instances},
                {"min-probes-per-query", stateful.min_probes_per_query},
                {"max-probes-per-query", stateful.max_probes_per_query},
                {"single-leader", stateful.single_leader},
                {"state-capacity-bytes", two_path_statefull().state_capacity}}},
              {"stateless", rows},
              {"seed-bits", seed_bits_json(0, 0)}};
  r.csv = csv.str();
  if (stateful.single_leader != stateful.instances || stateful.max_probes_per_query != 1 ||
      stateful.min_probes_per_query != 1) {
    r.failed_check = "state-full leader election misbehaved";
  } else if (!linear) {
    r.failed_check = "stateless worst case below 0.5 n";
  }
  return r;
}

}  // namespace detail

inline CommandResult run_command(const ExperimentConfig& c) {
  CommandResult r;
  if (c.command == "gen-graph") r = detail::gen_graph(c);
  else if (c.command == "run-local") r = detail::run_local_cmd(c);
  else if (c.command == "run-lca") r = detail::run_lca_cmd(c);
  else if (c.command == "run-partree") r = detail::run_partree_cmd(c);
  else if (c.command == "localize") r = detail::localize_cmd(c);
  else if (c.command == "estimate-failure") r = detail::estimate_failure_cmd(c);
  else if (c.command == "derandomize-search") r = detail::derandomize_cmd(c);
  else if (c.command == "lowerbound") r = detail::lowerbound_cmd(c);
  else if (c.command == "perm-test") r = detail::perm_test_cmd(c);
  else if (c.command == "two-path-gap") r = detail::two_path_gap_cmd(c);
  else throw SchemaError("unknown command '" + c.command + "'");
  r.report["command"] = c.command;
  r.report["config"] = config_json(c);
  r.report["config-hash"] = config_hash(c);
  return r;
}

// 0 success, 1 schema violation, 2 guard or check failure.
inline int exit_code_for(const Error& e) {
  const std::string kind = e.kind();
  return kind == "schema" || kind == "parse-error" || kind == "invalid-argument" ? 1 : 2;
}

inline Json error_record(const std::string& kind, const std::string& message) {
  return {{"error", {{"kind", kind}, {"message", message}}}};
}

}  // namespace locality
