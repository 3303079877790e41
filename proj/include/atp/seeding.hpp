#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace atp {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Master seed -> independent per-stage stream. Keyed by stage name so adding
// a stage never shifts the seeds of existing ones.
inline std::uint64_t stage_seed(std::uint64_t master, std::string_view stage) {
  return splitmix64(master ^ fnv1a64(stage));
}

// Per-unit substream (e.g. one strongly connected component), keyed by a
// stable integer id so results are independent of processing order.
inline std::uint64_t unit_seed(std::uint64_t stage, std::uint64_t unit) {
  return splitmix64(stage ^ splitmix64(unit));
}

// Uniform double in [0, 1) from the top 53 bits. Pinned here instead of
// <random> distributions so streams are identical across standard libraries.
inline double rng_unit(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Fisher-Yates with an explicit draw, same rationale as rng_unit.
template <typename T>
inline void shuffle_inplace(std::vector<T>& v, std::mt19937_64& g) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(g() % i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace atp
