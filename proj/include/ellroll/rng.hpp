#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ellroll {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; bijective on 64-bit words.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// 64-bit FNV-1a.
[[nodiscard]] constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Seed for an independent named stream: mix64(root ^ mix64(fnv1a64(name))).
// Streams never share state, so the order in which they are consumed cannot
// change another stream's draws.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view stream) {
  return mix64(root ^ mix64(fnv1a64(stream)));
}

struct RngStreams {
  Rng init;
  Rng exploration;
  Rng replay;

  explicit RngStreams(std::uint64_t root)
      : init(derive_seed(root, "init")),
        exploration(derive_seed(root, "exploration")),
        replay(derive_seed(root, "replay")) {}
};

}  // namespace ellroll
