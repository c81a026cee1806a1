#pragma once

#include <cstdint>
#include <random>

namespace ibounds::rng {

// splitmix64 finalizer; used to derive independent substream seeds so that
// results do not depend on thread scheduling.
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t substream(std::uint64_t master, std::uint64_t a,
                               std::uint64_t b = 0) {
  return mix(mix(master ^ mix(a)) ^ mix(b ^ 0xd1b54a32d192ed03ULL));
}

inline std::mt19937_64 engine(std::uint64_t seed) {
  return std::mt19937_64(mix(seed));
}

}  // namespace ibounds::rng
