#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dregsim {

using Seed = std::uint64_t;
using Engine = std::mt19937_64;

// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from a master seed and a path of
// stream identifiers. Depends only on the arguments, never on scheduling,
// so results are identical for any worker count.
constexpr Seed derive_seed(Seed master, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = mix64(master);
  for (std::uint64_t p : path) s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

// Stream used to draw the dataset of Monte Carlo replicate `r`. Every
// estimator and path simulator evaluated on replicate `r` sees the same data.
constexpr Seed replicate_seed(Seed master, std::uint64_t r) noexcept {
  return derive_seed(master, {0x5245504cULL, r});
}

inline Engine make_engine(Seed seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Engine(seq);
}

}  // namespace dregsim
