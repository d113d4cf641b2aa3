#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "locality/error.hpp"

#if defined(__x86_64__)
#include <immintrin.h>
#endif

namespace locality::gf2 {

// Polynomials over GF(2) as bit masks; bit i is the coefficient of t^i.
inline int degree(std::uint64_t p) { return p ? 63 - std::countl_zero(p) : -1; }

// a * b mod f, where f has degree m <= 63 and a, b have degree < m.
inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t f, int m) {
  const std::uint64_t top = std::uint64_t{1} << m;
  std::uint64_t acc = 0;
  while (b) {
    if (b & 1) acc ^= a;
    b >>= 1;
    a <<= 1;
    if (a & top) a ^= f;
  }
  return acc;
}

inline std::uint64_t poly_mod(std::uint64_t a, std::uint64_t f) {
  const int df = degree(f);
  for (int da = degree(a); da >= df; da = degree(a)) a ^= f << (da - df);
  return a;
}

inline std::uint64_t poly_gcd(std::uint64_t a, std::uint64_t b) {
  while (b) {
    a = poly_mod(a, b);
    std::swap(a, b);
  }
  return a;
}

// Ben-Or irreducibility test: f of degree m is irreducible iff
// gcd(t^(2^i) - t, f) = 1 for all 1 <= i <= m/2.
inline bool is_irreducible(std::uint64_t f) {
  const int m = degree(f);
  if (m < 1) return false;
  if (m == 1) return true;
  const std::uint64_t t = 2;
  std::uint64_t u = t;
  for (int i = 1; i <= m / 2; ++i) {
    u = mulmod(u, u, f, m);
    if (poly_gcd(f, u ^ t) != 1) return false;
  }
  return true;
}

// Smallest irreducible polynomial of degree m (full mask including t^m).
inline std::uint64_t irreducible(int m) {
  if (m < 1 || m > 63) throw InvalidArgument("GF(2^m) needs 1 <= m <= 63");
  static const std::array<std::uint64_t, 64> table = [] {
    std::array<std::uint64_t, 64> out{};
    for (int d = 1; d <= 63; ++d) {
      const std::uint64_t top = std::uint64_t{1} << d;
      for (std::uint64_t low = 1; low < top; low += 2) {
        if (is_irreducible(top | low)) {
          out[d] = top | low;
          break;
        }
      }
    }
    out[1] = 3;
    return out;
  }();
  return table[m];
}

using u128 = unsigned __int128;

// Carry-less product, 4-bit windows. Operands below 2^63.
inline u128 clmul_soft(std::uint64_t a, std::uint64_t b) {
  u128 table[16];
  table[0] = 0;
  for (int v = 1; v < 16; ++v) {
    const int low = std::countr_zero(static_cast<unsigned>(v));
    table[v] = table[v & (v - 1)] ^ (static_cast<u128>(a) << low);
  }
  u128 acc = 0;
  for (int shift = 60; shift >= 0; shift -= 4) acc = (acc << 4) ^ table[(b >> shift) & 15];
  return acc;
}

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define LOCALITY_HAVE_PCLMUL_PATH 1
__attribute__((target("pclmul,sse4.1"))) inline u128 clmul_hw(std::uint64_t a, std::uint64_t b) {
  const __m128i r = _mm_clmulepi64_si128(_mm_cvtsi64_si128(static_cast<long long>(a)),
                                         _mm_cvtsi64_si128(static_cast<long long>(b)), 0);
  return (static_cast<u128>(static_cast<std::uint64_t>(_mm_extract_epi64(r, 1))) << 64) |
         static_cast<std::uint64_t>(_mm_cvtsi128_si64(r));
}
#endif

// GF(2^m) with Barrett reduction: for deg P < 2m,
// P mod f = P + f * floor(floor(P / t^m) * mu / t^m), mu = floor(t^2m / f).
class Field {
 public:
  Field() : Field(3, 1) {}
  Field(std::uint64_t f, int m) : f_(f), m_(m) {
    if (m < 1 || m > 63 || degree(f) != m) throw InvalidArgument("bad field modulus");
    u128 rem = static_cast<u128>(1) << (2 * m);
    std::uint64_t q = 0;
    for (int d = 2 * m; d >= m; --d) {
      if ((rem >> d) & 1) {
        rem ^= static_cast<u128>(f) << (d - m);
        q |= std::uint64_t{1} << (d - m);
      }
    }
    mu_ = q;
    // s_j = low bit of t^j mod f for j < 2m.
    std::uint64_t tj = 1;
    for (int j = 0; j < 2 * m; ++j) {
      low_bits_ |= static_cast<u128>(tj & 1) << j;
      tj = mulmod(tj, poly_mod(2, f), f, m);
    }
#ifdef LOCALITY_HAVE_PCLMUL_PATH
    hw_ = __builtin_cpu_supports("pclmul") && __builtin_cpu_supports("sse4.1");
#endif
  }

  int m() const { return m_; }
  std::uint64_t modulus() const { return f_; }

  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
#ifdef LOCALITY_HAVE_PCLMUL_PATH
    if (hw_) return mul_hw(a, b);
#endif
    return reduce(clmul_soft(a, b), clmul_soft);
  }

  // The low bit of c * X mod f is linear in X: it equals parity(w & X) with
  // w = low_bit_form(c).
  std::uint64_t low_bit_form(std::uint64_t c) const {
    std::uint64_t w = 0;
    for (int b = 0; b < m_; ++b) {
      const std::uint64_t window = static_cast<std::uint64_t>(low_bits_ >> b);
      w |= static_cast<std::uint64_t>(std::popcount(c & window) & 1) << b;
    }
    return w;
  }

  // Low bit of sum_i c_i x^i given forms[i] = low_bit_form(c_i). The powers
  // are built as x^i = x^(i/2) x^(i - i/2), so the products are independent.
  bool low_bit_eval(std::span<const std::uint64_t> forms, std::uint64_t x) const {
#ifdef LOCALITY_HAVE_PCLMUL_PATH
    if (hw_) return low_bit_eval_hw(forms, x);
#endif
    return low_bit_eval_with(forms, x, [this](std::uint64_t a, std::uint64_t b) {
      return reduce(clmul_soft(a, b), clmul_soft);
    });
  }

  // coeffs[0] + coeffs[1] x + ... by Horner's rule.
  std::uint64_t eval(std::span<const std::uint64_t> coeffs, std::uint64_t x) const {
#ifdef LOCALITY_HAVE_PCLMUL_PATH
    if (hw_) return eval_hw(coeffs, x);
#endif
    std::uint64_t acc = 0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = reduce(clmul_soft(acc, x), clmul_soft) ^ coeffs[i];
    return acc;
  }

 private:
  template <class Mul>
  std::uint64_t reduce(u128 p, Mul&& mul) const {
    const std::uint64_t hi = static_cast<std::uint64_t>(p >> m_);
    const std::uint64_t q = static_cast<std::uint64_t>(mul(hi, mu_) >> m_);
    const std::uint64_t mask = (std::uint64_t{1} << m_) - 1;
    return static_cast<std::uint64_t>(p ^ mul(q, f_)) & mask;
  }

  template <class Mul>
  static bool low_bit_eval_with(std::span<const std::uint64_t> forms, std::uint64_t x, Mul&& mul) {
    const std::size_t k = forms.size();
    if (k == 0) return false;
    std::array<std::uint64_t, 256> small;
    std::vector<std::uint64_t> large;
    std::uint64_t* pow = small.data();
    if (k > small.size()) {
      large.resize(k);
      pow = large.data();
    }
    pow[0] = 1;
    std::uint64_t acc = forms[0] & 1;
    if (k > 1) {
      pow[1] = x;
      acc ^= forms[1] & x;
    }
    for (std::size_t i = 2; i < k; ++i) {
      pow[i] = mul(pow[i / 2], pow[i - i / 2]);
      acc ^= forms[i] & pow[i];
    }
    return std::popcount(acc) & 1;
  }

#ifdef LOCALITY_HAVE_PCLMUL_PATH
  __attribute__((target("pclmul,sse4.1"))) bool low_bit_eval_hw(std::span<const std::uint64_t> forms,
                                                             std::uint64_t x) const {
    const std::size_t k = forms.size();
    if (k == 0) return false;
    std::array<std::uint64_t, 256> small;
    std::vector<std::uint64_t> large;
    std::uint64_t* pow = small.data();
    if (k > small.size()) {
      large.resize(k);
      pow = large.data();
    }
    pow[0] = 1;
    std::uint64_t acc = forms[0] & 1;
    if (k > 1) {
      pow[1] = x;
      acc ^= forms[1] & x;
    }
    for (std::size_t i = 2; i < k; ++i) {
      pow[i] = mul_hw(pow[i / 2], pow[i - i / 2]);
      acc ^= forms[i] & pow[i];
    }
    return std::popcount(acc) & 1;
  }
  // Same reduction as reduce(), spelled out so every clmul inlines.
  __attribute__((target("pclmul,sse4.1"))) std::uint64_t mul_hw(std::uint64_t a, std::uint64_t b) const {
    const u128 p = clmul_hw(a, b);
    const std::uint64_t q = static_cast<std::uint64_t>(clmul_hw(static_cast<std::uint64_t>(p >> m_), mu_) >> m_);
    const std::uint64_t mask = (std::uint64_t{1} << m_) - 1;
    return static_cast<std::uint64_t>(p ^ clmul_hw(q, f_)) & mask;
  }
  __attribute__((target("pclmul,sse4.1"))) std::uint64_t eval_hw(std::span<const std::uint64_t> coeffs,
                                                              std::uint64_t x) const {
    std::uint64_t acc = 0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = mul_hw(acc, x) ^ coeffs[i];
    return acc;
  }
  bool hw_ = false;
#endif

  std::uint64_t f_;
  int m_;
  std::uint64_t mu_ = 0;
  u128 low_bits_ = 0;
};

}  // namespace locality::gf2
