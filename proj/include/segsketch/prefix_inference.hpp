#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "segsketch/address.hpp"

namespace segsketch {

inline constexpr int kDefaultMaxDepth = 7;

// Segment layout for halved-segment hashing.
//   width: G, bits per segment (2, 4, 6 or 8)
//   depth: D, number of halvings; the subnet bitmap holds 2^D cells
//   level_salt: mixes the level index into each segment hash
struct SegmentConfig {
  int width = 4;
  int depth = 7;
  bool level_salt = false;

  // D = min(V - 1, max_depth).
  static SegmentConfig with_width(int width, int max_depth = kDefaultMaxDepth,
                                  bool level_salt = false);

  int segment_count() const noexcept { return (32 + width - 1) / width; }
  std::uint32_t cells() const noexcept { return std::uint32_t{1} << depth; }
  std::uint32_t size_bytes() const noexcept { return (cells() + 7) / 8; }
  int max_prefix_bits() const noexcept { return depth * width; }

  void validate() const;

  friend bool operator==(const SegmentConfig&, const SegmentConfig&) = default;
};

struct Segment {
  std::uint32_t value;
  int width;
  friend bool operator==(const Segment&, const Segment&) = default;
};

// L[1..V], most significant first. Only the last segment may be narrower.
struct SegmentedAddress {
  std::vector<Segment> segments;
};

SegmentedAddress segment_address(Address addr, const SegmentConfig& cfg);

// Value of the 1-based segment `index`; valid for index < V, where every
// segment is full width.
inline std::uint32_t segment_value(Address addr, int index, int width) noexcept {
  return (addr >> (32 - index * width)) & ((std::uint32_t{1} << width) - 1);
}

// The 2-value segment hash for one seed, tabulated over every (level, value).
class SegmentHasher {
 public:
  SegmentHasher(const SegmentConfig& cfg, std::uint64_t seed);

  bool bit(int level, std::uint32_t value) const noexcept {
    return table_[static_cast<std::size_t>(level - 1) * stride_ + value];
  }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::size_t stride_;
  std::vector<std::uint8_t> table_;
};

// Binary-search tree of segment-hash decisions. A flow walks half-open
// regions from [0, 2^D); at each depth it checks whether the sibling half
// already holds a set cell, which records where observed addresses diverge.
class SubnetBitmap {
 public:
  explicit SubnetBitmap(const SegmentConfig& cfg);

  // Returns the depth k in [1, D+1] at which divergence was seen (D+1: none).
  int insert(Address addr, const SegmentHasher& hasher) noexcept;

  // Lower bound p on the common prefix length, a multiple of G in [0, D*G].
  // Throws EmptyBitmap when no cell is set.
  int derive_prefix() const;

  bool any(std::uint32_t lo, std::uint32_t hi) const noexcept {
    if (lo >= hi) return false;
    if ((lo >> 6) == ((hi - 1) >> 6)) {
      const std::uint64_t head = ~std::uint64_t{0} << (lo & 63);
      const std::uint64_t tail = ~std::uint64_t{0} >> (63 - ((hi - 1) & 63));
      return (words_[lo >> 6] & head & tail) != 0;
    }
    return any_slow(lo, hi);
  }
  bool test(std::uint32_t cell) const noexcept { return (words_[cell >> 6] >> (cell & 63)) & 1u; }
  bool empty() const noexcept;
  std::uint32_t count() const noexcept;
  void reset() noexcept;

  const SegmentConfig& config() const noexcept { return cfg_; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }
  void assign_words(std::span<const std::uint64_t> words);

  friend bool operator==(const SubnetBitmap&, const SubnetBitmap&) = default;

 private:
  bool any_slow(std::uint32_t lo, std::uint32_t hi) const noexcept;
  void set(std::uint32_t cell) noexcept { words_[cell >> 6] |= std::uint64_t{1} << (cell & 63); }

  SegmentConfig cfg_;
  std::vector<std::uint64_t> words_;
};

// Low (32 - p) bits of an address. Width 32 is the full address, width 0 the
// empty suffix.
struct HostSuffix {
  std::uint32_t value;
  int width;

  // Hash key; suffixes of different widths never share a key.
  std::uint64_t key() const noexcept {
    return (static_cast<std::uint64_t>(width) << 32) | value;
  }
  friend bool operator==(const HostSuffix&, const HostSuffix&) = default;
};

inline HostSuffix host_suffix(Address addr, int prefix_bits) noexcept {
  const int width = 32 - prefix_bits;
  if (width <= 0) return {0, 0};
  if (width >= 32) return {addr, 32};
  return {addr & ((std::uint32_t{1} << width) - 1), width};
}

}  // namespace segsketch
