#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "locality/error.hpp"
#include "locality/gf2.hpp"
#include "locality/rng.hpp"

namespace locality {

inline constexpr std::uint64_t kExplicitLimit = std::uint64_t{1} << 24;

class Permutation {
 public:
  virtual ~Permutation() = default;
  virtual std::uint64_t domain_size() const = 0;
  virtual std::uint64_t forward(std::uint64_t x) = 0;
  virtual std::uint64_t inverse(std::uint64_t y) = 0;
  virtual std::string family() const = 0;
  virtual std::uint64_t seed() const = 0;
  virtual std::uint64_t declared_seed_bits() const = 0;
  virtual std::optional<std::uint64_t> k() const { return std::nullopt; }
  virtual std::optional<double> epsilon() const { return std::nullopt; }

 protected:
  void check_domain(std::uint64_t x) const {
    if (x >= domain_size()) {
      throw InvalidArgument("permutation argument " + std::to_string(x) + " outside [0," +
                            std::to_string(domain_size()) + ")");
    }
  }
};

using PermutationPtr = std::unique_ptr<Permutation>;

// ceil(log2(N!)): the information content of a uniform permutation.
inline std::uint64_t log2_factorial_bits(std::uint64_t n) {
  long double bits = 0;
  for (std::uint64_t i = 2; i <= n; ++i) bits += std::log2(static_cast<long double>(i));
  return static_cast<std::uint64_t>(std::ceil(bits - 1e-9L));
}

// Permutation number `rank` of [n] in lexicographic order (rank < n!).
inline std::vector<std::uint64_t> unrank_permutation(std::uint64_t n, std::uint64_t rank) {
  if (n > 20) throw ScaleGuard("unrank limited to n <= 20");
  std::vector<std::uint64_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::uint64_t{0});
  std::vector<std::uint64_t> fact(n + 1, 1);
  for (std::uint64_t i = 1; i <= n; ++i) fact[i] = fact[i - 1] * i;
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = n; i-- > 0;) {
    std::uint64_t q = rank / fact[i];
    rank %= fact[i];
    out.push_back(pool[q]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(q));
  }
  return out;
}

class ExplicitPermutation final : public Permutation {
 public:
  // Seeded Fisher-Yates over a counter stream; identical on every platform.
  ExplicitPermutation(std::uint64_t n, std::uint64_t seed) : seed_(seed) {
    if (n > kExplicitLimit) {
      throw ScaleGuard("explicit permutation limited to N <= 2^24, got " + std::to_string(n));
    }
    fwd_.resize(n);
    std::iota(fwd_.begin(), fwd_.end(), std::uint64_t{0});
    const std::uint64_t key = derive_seed(seed, "explicit", 0);
    std::uint64_t counter = 0;
    for (std::uint64_t i = n; i > 1; --i) {
      std::uint64_t j = stream_uniform(key, counter, i);
      std::swap(fwd_[i - 1], fwd_[j]);
    }
    build_inverse();
  }

  explicit ExplicitPermutation(std::vector<std::uint64_t> table, std::uint64_t seed = 0)
      : fwd_(std::move(table)), seed_(seed) {
    build_inverse();
  }

  std::uint64_t domain_size() const override { return fwd_.size(); }
  std::uint64_t forward(std::uint64_t x) override {
    check_domain(x);
    return fwd_[x];
  }
  std::uint64_t inverse(std::uint64_t y) override {
    check_domain(y);
    return inv_[y];
  }
  std::string family() const override { return "explicit"; }
  std::uint64_t seed() const override { return seed_; }
  std::uint64_t declared_seed_bits() const override { return log2_factorial_bits(fwd_.size()); }
  const std::vector<std::uint64_t>& table() const { return fwd_; }

 private:
  void build_inverse() {
    inv_.assign(fwd_.size(), fwd_.size());
    for (std::uint64_t x = 0; x < fwd_.size(); ++x) {
      if (fwd_[x] >= fwd_.size() || inv_[fwd_[x]] != fwd_.size()) {
        throw InvalidArgument("table is not a permutation");
      }
      inv_[fwd_[x]] = x;
    }
  }

  std::vector<std::uint64_t> fwd_, inv_;
  std::uint64_t seed_;
};

// Source of the uniform choices a lazy permutation makes.
class ChoiceSource {
 public:
  virtual ~ChoiceSource() = default;
  // Uniform in [0, bound), bound >= 1.
  virtual std::uint64_t choose(std::uint64_t bound) = 0;
};

// Choice i is drawn from its own counter stream keyed by (seed, i), so a
// replay with the same seed and the same call sequence is exact.
class CounterChoice final : public ChoiceSource {
 public:
  explicit CounterChoice(std::uint64_t seed) : key_(derive_seed(seed, "lazy", 0)) {}
  std::uint64_t choose(std::uint64_t bound) override {
    std::uint64_t sub = 0;
    return stream_uniform(stream_word(key_, index_++), sub, bound);
  }

 private:
  std::uint64_t key_;
  std::uint64_t index_ = 0;
};

// Deferred decisions: a fresh forward value is uniform over the outputs not
// yet used, a fresh inverse value uniform over the inputs not yet used.
class LazyPermutation final : public Permutation {
 public:
  LazyPermutation(std::uint64_t n, std::uint64_t seed)
      : n_(n), seed_(seed), owned_(std::make_unique<CounterChoice>(seed)), source_(*owned_) {}
  LazyPermutation(std::uint64_t n, ChoiceSource& source) : n_(n), seed_(0), source_(source) {}

  std::uint64_t domain_size() const override { return n_; }

  std::uint64_t forward(std::uint64_t x) override {
    check_domain(x);
    if (auto it = fwd_.find(x); it != fwd_.end()) return it->second;
    std::uint64_t y = nth_free(image_, source_.choose(n_ - image_.size()));
    assign(x, y);
    return y;
  }

  std::uint64_t inverse(std::uint64_t y) override {
    check_domain(y);
    if (auto it = inv_.find(y); it != inv_.end()) return it->second;
    std::uint64_t x = nth_free(preimage_, source_.choose(n_ - preimage_.size()));
    assign(x, y);
    return x;
  }

  std::string family() const override { return "lazy"; }
  std::uint64_t seed() const override { return seed_; }
  std::uint64_t declared_seed_bits() const override { return 64; }
  std::uint64_t evaluations() const { return fwd_.size(); }

 private:
  static std::uint64_t nth_free(const std::set<std::uint64_t>& used, std::uint64_t j) {
    std::uint64_t y = j;
    for (std::uint64_t t : used) {
      if (t > y) break;
      ++y;
    }
    return y;
  }

  void assign(std::uint64_t x, std::uint64_t y) {
    if (fwd_.count(x) || inv_.count(y)) throw InvariantViolation("lazy permutation collision");
    fwd_.emplace(x, y);
    inv_.emplace(y, x);
    image_.insert(y);
    preimage_.insert(x);
  }

  std::uint64_t n_;
  std::uint64_t seed_;
  std::unique_ptr<ChoiceSource> owned_;
  ChoiceSource& source_;
  std::unordered_map<std::uint64_t, std::uint64_t> fwd_, inv_;
  std::set<std::uint64_t> image_, preimage_;
};

// ---- k-wise eps-dependent family: swap-or-not with polynomial round functions ----

inline int field_bits(std::uint64_t n) {
  return n <= 2 ? 1 : static_cast<int>(std::bit_width(n - 1));
}

// log2 of the swap-or-not bound 4 N^1.5 / (r+4) * ((k+N)/(2N))^(r/4+1).
inline long double swap_or_not_log2_bound(std::uint64_t n, std::uint64_t k, std::uint64_t rounds) {
  const long double N = static_cast<long double>(n);
  const long double ratio = (static_cast<long double>(k) + N) / (2 * N);
  return 2 + 1.5L * std::log2(N) - std::log2(static_cast<long double>(rounds) + 4) +
         (static_cast<long double>(rounds) / 4 + 1) * std::log2(ratio);
}

// Smallest round count whose bound is <= eps.
inline std::uint64_t swap_or_not_rounds(std::uint64_t n, std::uint64_t k, double eps) {
  if (!(eps > 0 && eps < 1)) throw InvalidArgument("epsilon must lie in (0,1)");
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (n <= 1) return 0;
  if (k >= n) throw InvalidArgument("k-wise family needs k < N");
  const long double target = std::log2(static_cast<long double>(eps));
  std::uint64_t r = 1;
  while (swap_or_not_log2_bound(n, k, r) > target) {
    if (++r > 100000000) throw ScaleGuard("round count diverges");
  }
  return r;
}

struct KwiseParams {
  std::uint64_t n = 0;
  std::uint64_t k = 1;
  double eps = 0.5;
  std::uint64_t rounds = 0;       // derived
  int m = 1;                      // field degree, 2^m >= N
  std::uint64_t poly = 3;         // irreducible of degree m
  gf2::Field field;
  std::uint64_t coeffs = 1;       // per round: min(k, 2^m)
  double declared_eps = 0;        // bound at `rounds`

  static KwiseParams make(std::uint64_t n, std::uint64_t k, double eps) {
    KwiseParams p;
    p.n = n;
    p.k = k;
    p.eps = eps;
    p.rounds = swap_or_not_rounds(n, k, eps);
    p.m = field_bits(n);
    p.poly = gf2::irreducible(p.m);
    p.field = gf2::Field(p.poly, p.m);
    p.coeffs = p.m >= 63 ? k : std::min<std::uint64_t>(k, std::uint64_t{1} << p.m);
    p.declared_eps = n <= 1 ? 0.0 : static_cast<double>(std::exp2(swap_or_not_log2_bound(n, k, p.rounds)));
    return p;
  }

  std::uint64_t key_bits() const { return n <= 1 ? 0 : static_cast<std::uint64_t>(std::bit_width(n - 1)); }
  // Declared seed length: per round a key in Z_N and `coeffs` field elements.
  std::uint64_t seed_bits() const { return rounds * (key_bits() + coeffs * static_cast<std::uint64_t>(m)); }
};

namespace detail {

// F(x) = low bit of the polynomial with the given coefficients at x; takes
// the coefficients' low-bit forms.
inline bool round_bit(const KwiseParams& p, std::span<const std::uint64_t> forms, std::uint64_t x) {
  return p.field.low_bit_eval(forms, x);
}

inline std::uint64_t swap_round(const KwiseParams& p, std::uint64_t key,
                                std::span<const std::uint64_t> forms, std::uint64_t x) {
  const std::uint64_t partner = key >= x ? key - x : key + (p.n - x);
  const std::uint64_t canonical = std::max(x, partner);
  return round_bit(p, forms, canonical) ? partner : x;
}

}  // namespace detail

class KwisePermutation final : public Permutation {
 public:
  KwisePermutation(const KwiseParams& params, std::uint64_t seed) : p_(params), seed_(seed) {
    const std::uint64_t key = derive_seed(seed, "kwise", 0);
    std::uint64_t counter = 0;
    const std::uint64_t mask = p_.m >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << p_.m) - 1;
    keys_.resize(p_.rounds);
    coeffs_.resize(p_.rounds * p_.coeffs);
    for (std::uint64_t j = 0; j < p_.rounds; ++j) {
      keys_[j] = stream_uniform(key, counter, p_.n);
      for (std::uint64_t i = 0; i < p_.coeffs; ++i) {
        coeffs_[j * p_.coeffs + i] = p_.field.low_bit_form(stream_word(key, counter++) & mask);
      }
    }
  }

  std::uint64_t domain_size() const override { return p_.n; }
  std::uint64_t forward(std::uint64_t x) override {
    check_domain(x);
    for (std::uint64_t j = 0; j < p_.rounds; ++j) x = detail::swap_round(p_, keys_[j], round_coeffs(j), x);
    return x;
  }
  // Every round is an involution, so the inverse runs them backwards.
  std::uint64_t inverse(std::uint64_t y) override {
    check_domain(y);
    for (std::uint64_t j = p_.rounds; j-- > 0;) y = detail::swap_round(p_, keys_[j], round_coeffs(j), y);
    return y;
  }
  std::string family() const override { return "kwise"; }
  std::uint64_t seed() const override { return seed_; }
  std::uint64_t declared_seed_bits() const override { return p_.seed_bits(); }
  std::optional<std::uint64_t> k() const override { return p_.k; }
  std::optional<double> epsilon() const override { return p_.declared_eps; }
  const KwiseParams& params() const { return p_; }

 private:
  std::span<const std::uint64_t> round_coeffs(std::uint64_t j) const {
    return {coeffs_.data() + j * p_.coeffs, p_.coeffs};
  }

  KwiseParams p_;
  std::uint64_t seed_;
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint64_t> coeffs_;  // low-bit forms, p_.coeffs per round
};

// Memoizes an immutable permutation in both directions.
class CachedPermutation final : public Permutation {
 public:
  explicit CachedPermutation(Permutation& inner) : inner_(inner) {}
  std::uint64_t domain_size() const override { return inner_.domain_size(); }
  std::uint64_t forward(std::uint64_t x) override {
    if (auto it = fwd_.find(x); it != fwd_.end()) return it->second;
    std::uint64_t y = inner_.forward(x);
    fwd_.emplace(x, y);
    inv_.emplace(y, x);
    return y;
  }
  std::uint64_t inverse(std::uint64_t y) override {
    if (auto it = inv_.find(y); it != inv_.end()) return it->second;
    std::uint64_t x = inner_.inverse(y);
    fwd_.emplace(x, y);
    inv_.emplace(y, x);
    return x;
  }
  std::string family() const override { return inner_.family(); }
  std::uint64_t seed() const override { return inner_.seed(); }
  std::uint64_t declared_seed_bits() const override { return inner_.declared_seed_bits(); }
  std::optional<std::uint64_t> k() const override { return inner_.k(); }
  std::optional<double> epsilon() const override { return inner_.epsilon(); }

 private:
  Permutation& inner_;
  std::unordered_map<std::uint64_t, std::uint64_t> fwd_, inv_;
};

// ---- families ----

class PermutationFamily {
 public:
  virtual ~PermutationFamily() = default;
  virtual std::string name() const = 0;
  virtual std::uint64_t domain_size() const = 0;
  virtual PermutationPtr sample(std::uint64_t seed) const = 0;
  virtual std::uint64_t seed_bits() const = 0;
  virtual std::optional<double> epsilon() const { return std::nullopt; }
  virtual std::optional<std::uint64_t> k() const { return std::nullopt; }
};

// A family whose member is stage_{s-1} o ... o stage_0, each stage drawn
// independently and uniformly from a finite seed set. This is what the
// exhaustive tuple test enumerates.
class StagedFamily : public PermutationFamily {
 public:
  virtual std::size_t stage_count() const = 0;
  // Saturates at 2^64-1.
  virtual std::uint64_t stage_seed_count(std::size_t stage) const = 0;
  // out[x] = stage(x) for every x in [0, N).
  virtual void stage_table(std::size_t stage, std::uint64_t seed_index,
                           std::span<std::uint64_t> out) const = 0;
  // Stages with the same kind have the same distribution.
  virtual std::size_t stage_kind(std::size_t stage) const { return stage; }
};

class ExplicitFamily final : public StagedFamily {
 public:
  explicit ExplicitFamily(std::uint64_t n) : n_(n) {}
  std::string name() const override { return "explicit"; }
  std::uint64_t domain_size() const override { return n_; }
  PermutationPtr sample(std::uint64_t seed) const override {
    return std::make_unique<ExplicitPermutation>(n_, seed);
  }
  std::uint64_t seed_bits() const override { return log2_factorial_bits(n_); }
  std::optional<double> epsilon() const override { return 0.0; }
  std::size_t stage_count() const override { return 1; }
  std::uint64_t stage_seed_count(std::size_t) const override {
    std::uint64_t f = 1;
    for (std::uint64_t i = 2; i <= n_; ++i) {
      if (f > kSaturatedCount / i) return kSaturatedCount;
      f *= i;
    }
    return f;
  }
  void stage_table(std::size_t, std::uint64_t s, std::span<std::uint64_t> out) const override {
    auto p = unrank_permutation(n_, s);
    std::copy(p.begin(), p.end(), out.begin());
  }

 private:
  static constexpr std::uint64_t kSaturatedCount = ~std::uint64_t{0};
  std::uint64_t n_;
};

// Point mass on the identity: a deliberately bad family for calibration.
class IdentityFamily final : public StagedFamily {
 public:
  explicit IdentityFamily(std::uint64_t n) : n_(n) {}
  std::string name() const override { return "identity"; }
  std::uint64_t domain_size() const override { return n_; }
  PermutationPtr sample(std::uint64_t) const override {
    std::vector<std::uint64_t> id(n_);
    std::iota(id.begin(), id.end(), std::uint64_t{0});
    return std::make_unique<ExplicitPermutation>(std::move(id));
  }
  std::uint64_t seed_bits() const override { return 0; }
  std::size_t stage_count() const override { return 1; }
  std::uint64_t stage_seed_count(std::size_t) const override { return 1; }
  void stage_table(std::size_t, std::uint64_t, std::span<std::uint64_t> out) const override {
    std::iota(out.begin(), out.end(), std::uint64_t{0});
  }

 private:
  std::uint64_t n_;
};

class KwiseFamily final : public StagedFamily {
 public:
  KwiseFamily(std::uint64_t n, std::uint64_t k, double eps) : p_(KwiseParams::make(n, k, eps)) {}
  std::string name() const override { return "kwise"; }
  std::uint64_t domain_size() const override { return p_.n; }
  PermutationPtr sample(std::uint64_t seed) const override {
    return std::make_unique<KwisePermutation>(p_, seed);
  }
  std::uint64_t seed_bits() const override { return p_.seed_bits(); }
  std::optional<double> epsilon() const override { return p_.declared_eps; }
  std::optional<std::uint64_t> k() const override { return p_.k; }
  const KwiseParams& params() const { return p_; }

  std::size_t stage_count() const override { return p_.rounds; }
  std::uint64_t stage_seed_count(std::size_t) const override {
    const std::uint64_t bits = p_.coeffs * static_cast<std::uint64_t>(p_.m);
    if (bits >= 64) return ~std::uint64_t{0};
    const std::uint64_t per_key = std::uint64_t{1} << bits;
    if (per_key > ~std::uint64_t{0} / p_.n) return ~std::uint64_t{0};
    return per_key * p_.n;
  }
  void stage_table(std::size_t, std::uint64_t s, std::span<std::uint64_t> out) const override {
    const std::uint64_t key = s % p_.n;
    s /= p_.n;
    std::vector<std::uint64_t> coeffs(p_.coeffs);
    const std::uint64_t mask = (std::uint64_t{1} << p_.m) - 1;
    for (auto& c : coeffs) {
      c = p_.field.low_bit_form(s & mask);
      s >>= p_.m;
    }
    for (std::uint64_t x = 0; x < p_.n; ++x) out[x] = detail::swap_round(p_, key, coeffs, x);
  }
  std::size_t stage_kind(std::size_t) const override { return 0; }

 private:
  KwiseParams p_;
};

class LazyFamily final : public PermutationFamily {
 public:
  explicit LazyFamily(std::uint64_t n) : n_(n) {}
  std::string name() const override { return "lazy"; }
  std::uint64_t domain_size() const override { return n_; }
  PermutationPtr sample(std::uint64_t seed) const override {
    return std::make_unique<LazyPermutation>(n_, seed);
  }
  std::uint64_t seed_bits() const override { return 64; }
  std::optional<double> epsilon() const override { return 0.0; }

 private:
  std::uint64_t n_;
};

// ---- statistical distance on k-tuples ----

enum class TupleMode { exhaustive, sampled };

struct FamilyQuality {
  std::uint64_t k = 0;
  std::optional<double> epsilon;   // declared by the family
  double measured_distance = 0;
  TupleMode mode = TupleMode::exhaustive;
  std::uint64_t tuples_examined = 0;
  std::vector<std::uint64_t> worst_tuple;
};

inline constexpr std::uint64_t kExhaustiveSeedLimit = std::uint64_t{1} << 20;
inline constexpr std::uint64_t kExhaustiveDomainLimit = 12;

namespace detail {

// All ordered k-tuples of distinct elements of [n], lexicographic.
inline std::vector<std::vector<std::uint64_t>> distinct_tuples(std::uint64_t n, std::uint64_t k) {
  std::vector<std::vector<std::uint64_t>> out;
  std::vector<std::uint64_t> cur;
  std::vector<bool> used(n, false);
  auto rec = [&](auto&& self) -> void {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (std::uint64_t x = 0; x < n; ++x) {
      if (used[x]) continue;
      used[x] = true;
      cur.push_back(x);
      self(self);
      cur.pop_back();
      used[x] = false;
    }
  };
  rec(rec);
  return out;
}

using Matrix = std::vector<long double>;  // row-major T x T

inline Matrix multiply(const Matrix& a, const Matrix& b, std::size_t t) {
  Matrix c(t * t, 0.0L);
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t l = 0; l < t; ++l) {
      const long double x = a[i * t + l];
      if (x == 0) continue;
      for (std::size_t j = 0; j < t; ++j) c[i * t + j] += x * b[l * t + j];
    }
  }
  return c;
}

}  // namespace detail

// Exhaustive mode propagates the exact tuple distribution through the stages
// (transition matrix per stage kind, powers for repeated stages) and reports
// the worst input tuple. Sampled mode uses `trials` family members on a fixed
// probe set: the first and last tuples in lexicographic order plus six seeded
// random ones.
inline FamilyQuality tuple_uniformity_test(const PermutationFamily& family, std::uint64_t k,
                                           TupleMode mode, std::uint64_t trials = 0,
                                           std::uint64_t seed = 0) {
  const std::uint64_t n = family.domain_size();
  if (k < 1 || k > n) throw InvalidArgument("tuple size must satisfy 1 <= k <= N");
  FamilyQuality q;
  q.k = k;
  q.epsilon = family.epsilon();
  q.mode = mode;

  if (mode == TupleMode::exhaustive) {
    auto* staged = dynamic_cast<const StagedFamily*>(&family);
    if (!staged) throw ScaleGuard(family.name() + " has no enumerable seed space");
    if (n > kExhaustiveDomainLimit) throw ScaleGuard("exhaustive mode needs N <= 12");
    for (std::size_t s = 0; s < staged->stage_count(); ++s) {
      if (staged->stage_seed_count(s) > kExhaustiveSeedLimit) {
        throw ScaleGuard("exhaustive mode needs stage seed spaces <= 2^20");
      }
    }
    auto tuples = detail::distinct_tuples(n, k);
    const std::size_t t = tuples.size();
    std::map<std::vector<std::uint64_t>, std::size_t> index;
    for (std::size_t i = 0; i < t; ++i) index.emplace(tuples[i], i);

    std::map<std::size_t, detail::Matrix> by_kind;
    auto stage_matrix = [&](std::size_t s) -> const detail::Matrix& {
      auto kind = staged->stage_kind(s);
      auto it = by_kind.find(kind);
      if (it != by_kind.end()) return it->second;
      detail::Matrix m(t * t, 0.0L);
      const std::uint64_t seeds = staged->stage_seed_count(s);
      const long double w = 1.0L / static_cast<long double>(seeds);
      std::vector<std::uint64_t> table(n), image(k);
      for (std::uint64_t sd = 0; sd < seeds; ++sd) {
        staged->stage_table(s, sd, table);
        for (std::size_t i = 0; i < t; ++i) {
          for (std::uint64_t j = 0; j < k; ++j) image[j] = table[tuples[i][j]];
          m[i * t + index.at(image)] += w;
        }
      }
      return by_kind.emplace(kind, std::move(m)).first->second;
    };

    detail::Matrix total(t * t, 0.0L);
    for (std::size_t i = 0; i < t; ++i) total[i * t + i] = 1;
    std::size_t s = 0;
    while (s < staged->stage_count()) {
      std::size_t run = 1;
      while (s + run < staged->stage_count() &&
             staged->stage_kind(s + run) == staged->stage_kind(s)) {
        ++run;
      }
      detail::Matrix power = stage_matrix(s);
      for (std::size_t e = run; e > 0; e >>= 1) {
        if (e & 1) total = detail::multiply(total, power, t);
        if (e > 1) power = detail::multiply(power, power, t);
      }
      s += run;
    }
    const long double uniform = 1.0L / static_cast<long double>(t);
    for (std::size_t i = 0; i < t; ++i) {
      long double d = 0;
      for (std::size_t j = 0; j < t; ++j) d += std::fabs(total[i * t + j] - uniform);
      d /= 2;
      if (static_cast<double>(d) > q.measured_distance || q.worst_tuple.empty()) {
        q.measured_distance = static_cast<double>(d);
        q.worst_tuple = tuples[i];
      }
    }
    q.tuples_examined = t;
    return q;
  }

  if (trials == 0) throw InvalidArgument("sampled mode needs trials >= 1");
  std::vector<std::vector<std::uint64_t>> probes;
  {
    std::vector<std::uint64_t> first(k), last(k);
    for (std::uint64_t j = 0; j < k; ++j) {
      first[j] = j;
      last[j] = n - 1 - j;
    }
    probes.push_back(first);
    probes.push_back(last);
    const std::uint64_t key = derive_seed(seed, "tuple-probes", 0);
    std::uint64_t counter = 0;
    for (int r = 0; r < 6; ++r) {
      std::vector<std::uint64_t> tup;
      while (tup.size() < k) {
        std::uint64_t x = stream_uniform(key, counter, n);
        if (std::find(tup.begin(), tup.end(), x) == tup.end()) tup.push_back(x);
      }
      probes.push_back(tup);
    }
  }
  long double space = 1;
  for (std::uint64_t j = 0; j < k; ++j) space *= static_cast<long double>(n - j);
  std::vector<std::map<std::vector<std::uint64_t>, std::uint64_t>> hist(probes.size());
  std::vector<std::uint64_t> image(k);
  for (std::uint64_t tr = 0; tr < trials; ++tr) {
    auto perm = family.sample(derive_seed(seed, "tuple-trial", tr));
    for (std::size_t p = 0; p < probes.size(); ++p) {
      for (std::uint64_t j = 0; j < k; ++j) image[j] = perm->forward(probes[p][j]);
      ++hist[p][image];
    }
  }
  const long double uniform = 1.0L / space;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    long double d = 0;
    for (const auto& [tup, count] : hist[p]) {
      d += std::fabs(static_cast<long double>(count) / trials - uniform);
    }
    d += (space - static_cast<long double>(hist[p].size())) * uniform;
    d /= 2;
    if (static_cast<double>(d) > q.measured_distance || q.worst_tuple.empty()) {
      q.measured_distance = static_cast<double>(d);
      q.worst_tuple = probes[p];
    }
  }
  q.tuples_examined = probes.size();
  return q;
}

// ---- inspections of pi and the positive-sequence rewrite ----

// direction +1: pi(x) = y; direction -1: pi^-1(x) = y.
struct Inspection {
  std::uint64_t x = 0;
  std::uint64_t y = 0;
  int direction = 1;
  bool operator==(const Inspection&) const = default;
};

inline std::vector<Inspection> positive_form(std::span<const Inspection> seq) {
  std::vector<Inspection> out;
  out.reserve(seq.size());
  for (const auto& s : seq) {
    out.push_back(s.direction > 0 ? s : Inspection{s.y, s.x, 1});
  }
  return out;
}

inline bool agrees(Permutation& pi, std::span<const Inspection> seq) {
  for (const auto& s : seq) {
    if ((s.direction > 0 ? pi.forward(s.x) : pi.inverse(s.x)) != s.y) return false;
  }
  return true;
}

}  // namespace locality
