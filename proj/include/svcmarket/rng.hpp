#pragma once

#include <cstdint>
#include <random>

namespace svcmarket {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to derive independent sub-seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Combines a parent seed with a stream index. Distinct (seed, stream)
/// pairs give statistically independent generators.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

/// Seed of replication `index` under `master_seed`.
constexpr std::uint64_t replication_seed(std::uint64_t master_seed,
                                         std::uint64_t index) noexcept {
  return mix_seed(master_seed, index);
}

// Stream ids inside one run. Arrivals never share a stream with decisions,
// so changing topology or measurement method cannot perturb the order stream.
inline constexpr std::uint64_t kArrivalStream = 1;
inline constexpr std::uint64_t kTopologyStreamBase = 1000;

}  // namespace svcmarket
