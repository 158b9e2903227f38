#pragma once

#include <cstdint>
#include <random>

namespace draf {

using Rng = std::mt19937_64;

/// SplitMix64 finaliser; used to derive independent stream seeds from
/// (base seed, stream index) so results do not depend on thread count.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return Rng(mix_seed(seed, stream));
}

// Fixed stream ids so e.g. init and batch shuffling never share draws.
namespace streams {
inline constexpr std::uint64_t kInit = 1;
inline constexpr std::uint64_t kBatch = 2;
inline constexpr std::uint64_t kSplit = 3;
inline constexpr std::uint64_t kGenerate = 4;
inline constexpr std::uint64_t kRestarts = 5;
}  // namespace streams

}  // namespace draf
