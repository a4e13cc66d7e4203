#pragma once

// Counter-based seeding: every (seed, stream, substream) triple maps to an
// independent generator, so replications reproduce under any execution order.

#include <cstdint>
#include <random>

namespace mogi {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0,
                                std::uint64_t substream = 0) {
  std::uint64_t s = splitmix64(seed) ^ splitmix64(0x517cc1b727220a95ULL + stream);
  s = splitmix64(s ^ splitmix64(0x2545f4914f6cdd1dULL + substream));
  return std::mt19937_64(s);
}

}  // namespace mogi
