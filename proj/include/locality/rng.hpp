#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace locality {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                       std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Sub-seed for (master, module, index). Modules pass a fixed label such as
// "localizer-pi" so that streams of different modules never overlap.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                                           std::uint64_t index) {
  std::uint64_t h = splitmix64(master ^ fnv1a64(label));
  return splitmix64(h ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

// Stateless counter-based stream: word i of stream `key`.
inline constexpr std::uint64_t stream_word(std::uint64_t key, std::uint64_t i) {
  return splitmix64(splitmix64(key) ^ (i * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

// Uniform integer in [0, bound) drawn from consecutive words of a counter
// stream, using Lemire's multiply-shift with rejection. `counter` is advanced
// by the number of words consumed.
inline std::uint64_t stream_uniform(std::uint64_t key, std::uint64_t& counter,
                                    std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = stream_word(key, counter++);
    const unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
    if (static_cast<std::uint64_t>(m) >= threshold) {
      return static_cast<std::uint64_t>(m >> 64);
    }
  }
}

using Rng = std::mt19937_64;

}  // namespace locality
