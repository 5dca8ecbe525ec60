#pragma once

#include <cstdint>

namespace mkews {

/// splitmix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of stream `index` under `master`:
///   mix_seed(master, index) = splitmix64(master ^ splitmix64(index)).
/// Replicates, restarts and surrogates all draw their seeds this way, so a
/// result depends only on (master, index) and never on scheduling order.
constexpr std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index));
}

}  // namespace mkews
