#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace dagcn {

// splitmix64 step; used to derive independent sub-stream seeds so that adding
// a consumer does not shift the draws of existing ones.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t salt = 0) {
  return std::mt19937_64(mix_seed(seed, salt));
}

// Uniform sample of `count` distinct values from {0..n-1}, ascending order.
std::vector<int> sample_without_replacement(int n, int count, std::mt19937_64& rng);

}  // namespace dagcn
