#pragma once

#include <cstdint>

namespace segsketch {

// Keyed 64-bit hash. Two rounds of the murmur3 finalizer with seed-derived
// keys; every sketch component draws its hash functions from here so a build
// is deterministic for a given seed.
constexpr std::uint64_t fmix64(std::uint64_t x) noexcept {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

constexpr std::uint64_t hash64(std::uint64_t key, std::uint64_t seed) noexcept {
  const std::uint64_t k1 = fmix64(seed + 0x9e3779b97f4a7c15ULL);
  const std::uint64_t k2 = fmix64(seed ^ 0x2545f4914f6cdd1dULL);
  return fmix64(fmix64(key ^ k1) + k2);
}

// Maps a 64-bit hash onto [0, n) using the high 32 bits (multiply-shift).
constexpr std::uint32_t reduce(std::uint64_t h, std::uint32_t n) noexcept {
  return static_cast<std::uint32_t>(((h >> 32) * static_cast<std::uint64_t>(n)) >> 32);
}

// Derives the i-th independent seed from a base seed.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t i) noexcept {
  return fmix64(base * 0x9e3779b97f4a7c15ULL + (i + 1) * 0xbf58476d1ce4e5b9ULL);
}

}  // namespace segsketch
