#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string_view>

namespace varbai {

using Index = Eigen::Index;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used to derive independent per-run seeds from a
// base seed and a handful of integer keys.
inline std::uint64_t split_mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
  std::uint64_t h = split_mix(a);
  h = split_mix(h ^ split_mix(b));
  h = split_mix(h ^ split_mix(c));
  return h;
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline Rng make_rng(std::uint64_t seed) { return Rng(split_mix(seed)); }

}  // namespace varbai
