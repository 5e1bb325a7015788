#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace gnsstune {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; a bijective mixing of 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a master seed and a path of
/// counters (e.g. {prn, interval}). Identical paths give identical seeds
/// regardless of the order in which streams are requested.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(master);
  for (std::uint64_t p : path) {
    s = splitmix64(s ^ splitmix64(p + 0x632BE59BD9B4E019ULL));
  }
  return s;
}

/// 64-bit FNV-1a, used for stable hashing of text keys.
constexpr std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace gnsstune
