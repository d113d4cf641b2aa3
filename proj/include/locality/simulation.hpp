#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "locality/algorithms.hpp"
#include "locality/error.hpp"
#include "locality/graph.hpp"
#include "locality/models.hpp"
#include "locality/parallel.hpp"
#include "locality/permutations.hpp"
#include "locality/rng.hpp"

namespace locality {

// The known graph on the identifiers [n, N). Adjacency is computed on demand.
struct HSpec {
  enum class Kind { empty, cycle, callback };
  Kind kind = Kind::empty;
  std::function<std::vector<Vertex>(Vertex u, std::uint64_t n, std::uint64_t N)> adjacency;
  std::uint64_t degree_bound = 0;

  static HSpec empty() { return {}; }
  static HSpec cycle() { return {Kind::cycle, nullptr, 2}; }
  static HSpec callback(std::function<std::vector<Vertex>(Vertex, std::uint64_t, std::uint64_t)> fn,
                        std::uint64_t degree_bound) {
    return {Kind::callback, std::move(fn), degree_bound};
  }

  std::string to_string() const {
    switch (kind) {
      case Kind::empty: return "empty";
      case Kind::cycle: return "cycle";
      case Kind::callback: return "callback";
    }
    return "?";
  }

  static HSpec parse(std::string_view s) {
    if (s == "empty") return empty();
    if (s == "cycle") return cycle();
    throw ParseError("unknown h-spec '" + std::string(s) + "' (expected empty or cycle)");
  }
};

class VirtualWorld {
 public:
  VirtualWorld(const LabeledGraph& g, HSpec h, std::uint64_t N, Permutation& pi)
      : g_(g), h_(std::move(h)), N_(N), pi_(pi) {}

  const LabeledGraph& g() const { return g_; }
  const HSpec& h() const { return h_; }
  std::uint64_t n() const { return g_.order(); }
  std::uint64_t N() const { return N_; }
  Permutation& pi() const { return pi_; }
  bool in_g(Vertex u) const { return u < g_.order(); }

  // Adjacency of the true identifier u in G u H.
  std::vector<Vertex> true_neighbors(Vertex u) const {
    if (u >= N_) throw InvalidArgument("identifier " + std::to_string(u) + " outside [0,N)");
    if (in_g(u)) {
      auto nb = g_.neighbors(u);
      return {nb.begin(), nb.end()};
    }
    const std::uint64_t n = g_.order();
    const std::uint64_t size = N_ - n;
    switch (h_.kind) {
      case HSpec::Kind::empty: return {};
      case HSpec::Kind::cycle: {
        if (size == 1) return {};
        if (size == 2) return {u == n ? n + 1 : n};
        Vertex prev = u == n ? N_ - 1 : u - 1;
        Vertex next = u == N_ - 1 ? n : u + 1;
        std::vector<Vertex> out{prev, next};
        std::sort(out.begin(), out.end());
        return out;
      }
      case HSpec::Kind::callback: {
        auto out = h_.adjacency(u, n, N_);
        if (out.size() > h_.degree_bound) throw InvariantViolation("H exceeds its degree bound");
        for (Vertex w : out) {
          if (w < n || w >= N_ || w == u) throw InvariantViolation("H adjacency leaves [n,N)");
        }
        std::sort(out.begin(), out.end());
        return out;
      }
    }
    return {};
  }

 private:
  const LabeledGraph& g_;
  HSpec h_;
  std::uint64_t N_;
  Permutation& pi_;
};

inline VirtualWorld make_world(const LabeledGraph& g, HSpec h, std::uint64_t N, Permutation& pi) {
  if (N <= g.order()) {
    throw InvalidArgument("N must exceed n (N=" + std::to_string(N) + ", n=" +
                          std::to_string(g.order()) + ")");
  }
  if (pi.domain_size() != N) throw InvalidArgument("permutation domain differs from N");
  if (h.kind == HSpec::Kind::callback && !h.adjacency) throw InvalidArgument("callback H without adjacency");
  if (h.kind != HSpec::Kind::empty && h.degree_bound > g.delta()) {
    throw InvalidArgument("H degree " + std::to_string(h.degree_bound) + " exceeds delta " +
                          std::to_string(g.delta()));
  }
  return VirtualWorld(g, std::move(h), N, pi);
}

// pi(N(pi^-1(w))), sorted.
inline std::vector<Vertex> relabeled_probe(const VirtualWorld& world, Vertex w) {
  Vertex u = world.pi().inverse(w);
  std::vector<Vertex> out;
  for (Vertex x : world.true_neighbors(u)) out.push_back(world.pi().forward(x));
  std::sort(out.begin(), out.end());
  return out;
}

// The fully relabelled graph G u H as an oracle, without any failure rule.
class RelabeledOracle final : public Prober {
 public:
  explicit RelabeledOracle(const VirtualWorld& world) : world_(world) {}
  std::vector<Vertex> probe(Vertex w) override { return relabeled_probe(world_, w); }
  std::uint64_t id_space() const override { return world_.N(); }

 private:
  const VirtualWorld& world_;
};

struct QueryOutcome {
  Vertex query = 0;
  bool success = false;
  Label answer = 0;
  std::optional<Vertex> failed_at;    // true identifier whose global probe failed
  ProbeTranscript transcript;         // relabelled, as the algorithm saw it
  std::uint64_t g_probes = 0;
  std::uint64_t h_probes = 0;
  std::uint64_t local_probes = 0;
  std::uint64_t global_probes = 0;
  std::vector<Vertex> g_probed;       // true identifiers, in probe order
  std::vector<std::size_t> q_sizes;   // |Q| after each step
  std::vector<Vertex> discovered;     // final Q, sorted
  std::vector<Inspection> inspections;
};

namespace detail {

struct SimulationAbort {};

class SimulatingProber final : public Prober {
 public:
  SimulatingProber(const VirtualWorld& world, Vertex v, std::uint64_t budget, QueryOutcome& out,
                   const std::vector<std::uint64_t>& dist)
      : world_(world), budget_(budget), out_(out), dist_(dist) {
    q_.insert(v);
  }

  std::vector<Vertex> probe(Vertex w) override {
    if (steps_ >= budget_) {
      throw BudgetExceeded("probe budget " + std::to_string(budget_) + " exceeded");
    }
    Permutation& pi = world_.pi();
    const Vertex u = pi.inverse(w);
    out_.inspections.push_back({w, u, -1});
    const bool local = q_.count(u) > 0;
    if (local) {
      ++out_.local_probes;
    } else {
      ++out_.global_probes;
      if (world_.in_g(u)) {
        out_.failed_at = u;
        throw SimulationAbort{};
      }
      q_.insert(u);
    }
    ++steps_;
    auto nb = world_.true_neighbors(u);
    if (world_.in_g(u)) {
      ++out_.g_probes;
      out_.g_probed.push_back(u);
    } else {
      ++out_.h_probes;
    }
    std::vector<Vertex> answer;
    for (Vertex x : nb) {
      q_.insert(x);
      const Vertex y = pi.forward(x);
      out_.inspections.push_back({x, y, 1});
      answer.push_back(y);
    }
    std::sort(answer.begin(), answer.end());
    check_invariant();
    out_.q_sizes.push_back(q_.size());
    out_.transcript.entries.push_back({w, answer});
    return answer;
  }

  std::uint64_t id_space() const override { return world_.N(); }
  const std::set<Vertex>& discovered() const { return q_; }

 private:
  void check_invariant() const {
    for (Vertex x : q_) {
      if (!world_.in_g(x)) continue;
      if (dist_[x] == kUnreachable || dist_[x] > steps_) {
        throw InvariantViolation("discovered vertex " + std::to_string(x) + " at distance " +
                                 std::to_string(dist_[x]) + " after step " + std::to_string(steps_));
      }
    }
  }

  const VirtualWorld& world_;
  std::uint64_t budget_;
  QueryOutcome& out_;
  const std::vector<std::uint64_t>& dist_;
  std::set<Vertex> q_;
  std::uint64_t steps_ = 0;
};

inline std::uint64_t discovered_bound(std::uint64_t delta, std::uint64_t t) {
  return saturating_add(1, saturating_mul(delta + 1, t));
}

}  // namespace detail

// Runs the stateless algorithm on query pi(v) while answering only from what
// the simulation is allowed to know. A global probe whose preimage lies in
// V(G) outside Q fails, even when that vertex is close to v.
inline QueryOutcome simulate_query(const VirtualWorld& world, const AlgorithmHandle& alg, Vertex v,
                                   std::uint64_t budget, std::uint64_t alg_seed = 0) {
  if (!world.in_g(v)) throw InvalidArgument("query " + std::to_string(v) + " is not in V(G)");
  if (alg.model == Model::local || !alg.stateless()) {
    throw InvalidArgument(alg.name + " is not a stateless probe algorithm");
  }
  QueryOutcome out;
  out.query = v;
  const auto dist = bfs_distances(world.g(), v);
  detail::SimulatingProber sim(world, v, budget, out, dist);
  const Vertex start = world.pi().forward(v);
  out.inspections.push_back({v, start, 1});
  StateBuffer none(0);
  QueryContext ctx{alg_seed, none};
  try {
    out.answer = alg.rule(start, sim, ctx);
    check_label(alg, out.answer, world.N(), v);
    out.success = true;
  } catch (const detail::SimulationAbort&) {
    out.success = false;
  }
  out.discovered.assign(sim.discovered().begin(), sim.discovered().end());
  const std::uint64_t k = detail::discovered_bound(world.g().delta(), budget);
  if (out.discovered.size() > k) {
    throw InvariantViolation("|Q| = " + std::to_string(out.discovered.size()) + " exceeds k = " +
                             std::to_string(k));
  }
  return out;
}

struct FailureBound {
  std::uint64_t k = 0;
  double bound = 0;                   // k n / (N - k)
  std::optional<double> simplified;   // n^2 / N, when k <= n/2
};

inline FailureBound failure_bound(std::uint64_t n, std::uint64_t N, std::uint64_t delta,
                                  std::uint64_t t) {
  FailureBound f;
  f.k = detail::discovered_bound(delta, t);
  if (f.k >= N) {
    throw InvalidArgument("k = " + std::to_string(f.k) + " must be below N = " + std::to_string(N));
  }
  const long double ln = static_cast<long double>(n);
  const long double lN = static_cast<long double>(N);
  const long double lk = static_cast<long double>(f.k);
  f.bound = static_cast<double>(lk * ln / (lN - lk));
  if (2 * f.k <= n) f.simplified = static_cast<double>(ln * ln / lN);
  return f;
}

struct FailureEstimate {
  std::uint64_t trials = 0;
  std::uint64_t pairs = 0;
  std::uint64_t failures = 0;
  double rate = 0;
  FailureBound bound;
  double sigma = 0;      // binomial standard deviation at the bound
  double tolerance = 0;  // bound + 4 sigma
  bool within = false;
};

inline double binomial_sigma(double p, std::uint64_t samples) {
  p = std::clamp(p, 0.0, 1.0);
  return std::sqrt(p * (1 - p) / static_cast<double>(samples));
}

// One fresh pi per trial (sub-seed derived from `seed` and the trial index);
// every vertex of g is simulated once per trial. Trials run in parallel.
inline FailureEstimate estimate_failure(const LabeledGraph& g, const HSpec& h, std::uint64_t N,
                                        const AlgorithmHandle& alg, const PermutationFamily& family,
                                        std::uint64_t trials, std::uint64_t seed,
                                        std::optional<std::uint64_t> budget = {}) {
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  if (family.domain_size() != N) throw InvalidArgument("family domain differs from N");
  const std::uint64_t t = budget ? *budget : alg.complexity(N);
  FailureEstimate e;
  e.bound = failure_bound(g.order(), N, g.delta(), t);
  std::vector<std::uint64_t> failures(trials, 0);
  parallel_for(trials, [&](std::uint64_t trial) {
    auto pi = family.sample(derive_seed(seed, "estimate-failure", trial));
    CachedPermutation cached(*pi);
    auto world = make_world(g, h, N, cached);
    const std::uint64_t alg_seed = derive_seed(seed, "algorithm", trial);
    for (Vertex v = 0; v < g.order(); ++v) {
      if (!simulate_query(world, alg, v, t, alg_seed).success) ++failures[trial];
    }
  });
  e.trials = trials;
  e.pairs = trials * g.order();
  for (auto f : failures) e.failures += f;
  e.rate = static_cast<double>(e.failures) / static_cast<double>(e.pairs);
  e.sigma = binomial_sigma(e.bound.bound, e.pairs);
  e.tolerance = e.bound.bound + 4 * e.sigma;
  e.within = e.rate <= e.tolerance;
  return e;
}

// ---- derandomization at micro scale ----

// Every labelled graph on [n] with maximum degree <= delta, in order of the
// bitmask over the lexicographic list of vertex pairs.
inline std::vector<LabeledGraph> enumerate_graphs(std::uint64_t n, std::uint64_t delta) {
  std::vector<Edge> pairs;
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) pairs.push_back({u, v});
  }
  if (pairs.size() > 20) throw ScaleGuard("graph enumeration limited to 20 vertex pairs");
  std::vector<LabeledGraph> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs.size()); ++mask) {
    std::vector<Edge> edges;
    std::vector<std::uint64_t> deg(n, 0);
    bool ok = true;
    for (std::size_t i = 0; i < pairs.size() && ok; ++i) {
      if (!(mask >> i & 1)) continue;
      edges.push_back(pairs[i]);
      ok = ++deg[pairs[i].first] <= delta && ++deg[pairs[i].second] <= delta;
    }
    if (ok) out.emplace_back(n, delta, std::move(edges));
  }
  return out;
}

struct DerandomizeReport {
  std::uint64_t permutations = 0;
  std::uint64_t good = 0;
  double good_fraction = 0;
  double union_bound_prediction = 0;   // 1 - n |G| k n / (N - k)
  std::uint64_t graphs = 0;
  std::optional<std::vector<std::uint64_t>> first_good;   // lexicographically first
  std::vector<bool> verdicts;          // per permutation rank
};

inline constexpr std::uint64_t kDerandomizeLimit = 8;

// Tests every pi in S_N against every graph and every query.
inline DerandomizeReport derandomize_search(std::uint64_t n, std::uint64_t N, std::uint64_t delta,
                                            std::uint64_t t, const AlgorithmHandle& alg,
                                            const std::vector<LabeledGraph>& graphs,
                                            const HSpec& h = HSpec::empty()) {
  if (N > kDerandomizeLimit) throw ScaleGuard("derandomize_search enumerates S_N only for N <= 8");
  for (const auto& g : graphs) {
    if (g.order() != n) throw InvalidArgument("every graph must have n vertices");
  }
  DerandomizeReport r;
  r.permutations = 1;
  for (std::uint64_t i = 2; i <= N; ++i) r.permutations *= i;
  r.graphs = graphs.size();
  const auto fb = failure_bound(n, N, delta, t);
  r.union_bound_prediction = 1.0 - static_cast<double>(n * graphs.size()) * fb.bound;
  r.verdicts.assign(r.permutations, false);
  std::vector<char> good(r.permutations, 0);
  parallel_for(r.permutations, [&](std::uint64_t rank) {
    ExplicitPermutation pi(unrank_permutation(N, rank));
    for (const auto& g : graphs) {
      auto world = make_world(g, h, N, pi);
      for (Vertex v = 0; v < n; ++v) {
        if (!simulate_query(world, alg, v, t).success) return;
      }
    }
    good[rank] = 1;
  });
  for (std::uint64_t rank = 0; rank < r.permutations; ++rank) {
    r.verdicts[rank] = good[rank];
    if (!good[rank]) continue;
    ++r.good;
    if (!r.first_good) r.first_good = unrank_permutation(N, rank);
  }
  r.good_fraction = static_cast<double>(r.good) / static_cast<double>(r.permutations);
  return r;
}

// ---- locality certificates ----

struct LocalityCertificate {
  std::uint64_t radius = 0;   // largest distance of a G-probe from the query
  bool within_radius = true;
  bool connected = true;
  bool passes() const { return within_radius && connected; }
};

inline LocalityCertificate locality_certificate(std::span<const Vertex> g_probed,
                                                const LabeledGraph& g, Vertex v, std::uint64_t t) {
  LocalityCertificate c;
  const auto dist = bfs_distances(g, v);
  std::vector<Vertex> members{v};
  for (Vertex u : g_probed) {
    if (u >= g.order()) throw InvalidArgument("probed vertex outside V(g)");
    if (dist[u] == kUnreachable) {
      c.within_radius = false;
      c.radius = kUnreachable;
    } else {
      c.radius = std::max(c.radius, dist[u]);
      if (dist[u] > t) c.within_radius = false;
    }
    members.push_back(u);
  }
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  auto [sub, ids] = induced_subgraph(g, members);
  c.connected = connected_components(sub).size() == 1;
  return c;
}

inline bool probe_locality_certificate(std::span<const Vertex> g_probed, const LabeledGraph& g,
                                       Vertex v, std::uint64_t t) {
  return locality_certificate(g_probed, g, v, t).passes();
}

// ---- the constructive localizer ----

inline constexpr double kOverheadConstant = 1024.0;
inline constexpr double kDefaultGuardConstant = 64.0;

struct LocalizeOptions {
  std::uint64_t pi_seed = 0;
  std::uint64_t alg_seed = 0;
  std::optional<double> eps;            // default 1/n^2
  double guard_constant = kDefaultGuardConstant;
  double overhead_constant = kOverheadConstant;
};

struct SeedAccounting {
  std::uint64_t algorithm_bits = 0;     // s(N)
  std::uint64_t family_bits = 0;
  std::uint64_t total_bits = 0;
  double overhead_bound = 0;            // C t Delta log2 n
  double overhead_ratio = 0;            // family_bits / (t Delta log2 n)
  bool within = false;
};

struct QueryCertificate {
  Vertex query = 0;
  bool success = false;
  LocalityCertificate locality;
  std::uint64_t probes = 0;
  bool within_budget = true;
  bool passes() const { return success && locality.passes() && within_budget; }
};

struct LocalizedRun {
  std::uint64_t n = 0, N = 0, t = 0, k = 0, delta = 0;
  double eps = 0;                       // requested per-query eps
  double declared_eps = 0;              // family bound at its round count
  std::uint64_t rounds = 0;
  bool success = false;
  std::uint64_t failed_queries = 0;
  std::vector<Label> answers;           // meaningful when success; partners as true ids
  std::vector<QueryOutcome> outcomes;
  std::vector<QueryCertificate> certificates;
  SeedAccounting seeds;
};

inline std::uint64_t checked_fourth_power(std::uint64_t n) {
  if (n > 55108) throw ScaleGuard("n^4 overflows 64-bit identifiers");
  return n * n * n * n;
}

inline LocalizedRun run_localized_lca(const AlgorithmHandle& alg, const LabeledGraph& g,
                                      const HSpec& h, const LocalizeOptions& opt = {}) {
  if (alg.model == Model::local || !alg.stateless()) {
    throw InvalidArgument(alg.name + " is not a stateless probe algorithm");
  }
  LocalizedRun run;
  run.n = g.order();
  if (run.n < 2) throw InvalidArgument("localizer needs n >= 2");
  run.N = checked_fourth_power(run.n);
  run.delta = std::max<std::uint64_t>(g.delta(), 1);
  run.t = alg.complexity(run.N);
  const double guard = opt.guard_constant * std::pow(static_cast<double>(run.n), 0.25) /
                       static_cast<double>(run.delta);
  if (static_cast<double>(run.t) > guard) {
    throw ScaleGuard("t(n^4) = " + std::to_string(run.t) + " exceeds the guard " +
                     std::to_string(guard) + " = c n^(1/4) / delta");
  }
  run.k = detail::discovered_bound(run.delta, run.t);
  run.eps = opt.eps ? *opt.eps : 1.0 / static_cast<double>(run.n * run.n);
  KwiseFamily family(run.N, run.k, run.eps);
  run.rounds = family.params().rounds;
  run.declared_eps = family.params().declared_eps;
  auto pi = family.sample(opt.pi_seed);
  CachedPermutation cached(*pi);
  auto world = make_world(g, h, run.N, cached);

  run.success = true;
  for (Vertex v = 0; v < run.n; ++v) {
    auto out = simulate_query(world, alg, v, run.t, opt.alg_seed);
    QueryCertificate cert;
    cert.query = v;
    cert.success = out.success;
    cert.probes = out.transcript.total_probes();
    cert.within_budget = cert.probes <= run.t;
    cert.locality = locality_certificate(out.g_probed, g, v, run.t);
    if (!out.success) {
      run.success = false;
      ++run.failed_queries;
    }
    Label answer = out.success ? out.answer : kErrorLabel;
    // Partner labels come back relabelled; a partner outside G restricts to
    // "unmatched" on G.
    if (out.success && alg.labels.vertex_ids && answer != kUnmatched) {
      const Vertex u = cached.inverse(static_cast<Vertex>(answer));
      answer = u < run.n ? static_cast<Label>(u) : kUnmatched;
    }
    run.answers.push_back(answer);
    run.certificates.push_back(cert);
    run.outcomes.push_back(std::move(out));
  }

  auto& s = run.seeds;
  s.algorithm_bits = alg.seed_length(run.N);
  s.family_bits = family.seed_bits();
  s.total_bits = s.algorithm_bits + s.family_bits;
  const double unit = static_cast<double>(run.t) * static_cast<double>(run.delta) *
                      std::log2(static_cast<double>(run.n));
  s.overhead_bound = opt.overhead_constant * unit;
  s.overhead_ratio = unit > 0 ? static_cast<double>(s.family_bits) / unit : 0;
  s.within = static_cast<double>(s.family_bits) <= s.overhead_bound;
  return run;
}

struct RetriedRun {
  LocalizedRun run;        // the last attempt
  std::uint64_t attempts = 0;
};

inline constexpr std::uint64_t kDefaultMaxRetries = 8;

// Fresh pi seed per attempt until a run succeeds or max_attempts is reached.
inline RetriedRun localize_with_retry(const AlgorithmHandle& alg, const LabeledGraph& g,
                                      const HSpec& h, std::uint64_t seed,
                                      std::uint64_t max_attempts = kDefaultMaxRetries,
                                      LocalizeOptions opt = {}) {
  if (max_attempts < 1) throw InvalidArgument("max_attempts must be >= 1");
  RetriedRun r;
  for (std::uint64_t a = 0; a < max_attempts; ++a) {
    opt.pi_seed = derive_seed(seed, "localize", a);
    r.run = run_localized_lca(alg, g, h, opt);
    r.attempts = a + 1;
    if (r.run.success) break;
  }
  return r;
}

// The small-t regime of the non-constructive result: t < c sqrt(log2 n).
inline bool small_probe_regime(std::uint64_t n, std::uint64_t t, double c = 1.0) {
  return static_cast<double>(t) < c * std::sqrt(std::log2(static_cast<double>(std::max<std::uint64_t>(n, 2))));
}

}  // namespace locality
