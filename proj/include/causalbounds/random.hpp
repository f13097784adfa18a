#pragma once

#include <cstdint>
#include <random>

namespace cbounds {

// Independent streams are keyed by (seed, index, domain) so a replicate's
// draws never depend on which worker ran it or in what order.
enum class StreamDomain : std::uint64_t {
  Bootstrap = 1,
  Simulation = 2,
  CrossFit = 3,
  TrueAte = 4,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index, StreamDomain domain) {
  std::uint64_t key = splitmix64(seed);
  key = splitmix64(key ^ static_cast<std::uint64_t>(domain));
  key = splitmix64(key ^ index);
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(domain)};
  return std::mt19937_64(seq);
}

}  // namespace cbounds
