#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace segsketch {

// Linear Counting: b * ln(b / z). A saturated bitmap (z == 0) is clamped to
// z = 1 so the result stays finite.
double lc_estimate(std::uint32_t size_bits, std::uint32_t zero_count) noexcept;

// Fixed-size bit array with a cached population count. Size must be a
// positive multiple of 8 and at least 8.
class Bitmap {
 public:
  explicit Bitmap(std::uint32_t size_bits);

  std::uint32_t size_bits() const noexcept { return size_bits_; }
  std::uint32_t set_count() const noexcept { return set_count_; }
  std::uint32_t zero_count() const noexcept { return size_bits_ - set_count_; }
  std::uint32_t size_bytes() const noexcept { return size_bits_ / 8; }

  bool test(std::uint32_t index) const noexcept {
    return (words_[index >> 6] >> (index & 63)) & 1u;
  }

  // Returns true when the cell was previously 0.
  bool set(std::uint32_t index) noexcept {
    std::uint64_t& w = words_[index >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (index & 63);
    if (w & bit) return false;
    w |= bit;
    ++set_count_;
    return true;
  }

  // Sets cell H(key, seed) mod size_bits.
  void insert(std::uint64_t key, std::uint64_t seed) noexcept;

  double estimate() const noexcept { return lc_estimate(size_bits_, zero_count()); }

  void reset() noexcept;

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  // Replaces the cell contents; bits past size_bits must be zero.
  void assign_words(std::span<const std::uint64_t> words);

  friend bool operator==(const Bitmap&, const Bitmap&) = default;

 private:
  std::uint32_t size_bits_;
  std::uint32_t set_count_ = 0;
  std::vector<std::uint64_t> words_;
};

// Simplified multi-resolution bitmap: equal-size levels, level n receives a
// key with probability 2^-(n+1) (the last level absorbs the tail), and the
// estimate scales Linear Counting over the lowest run of usable levels.
class MultiScaleBitmap {
 public:
  MultiScaleBitmap(std::uint32_t levels, std::uint32_t level_bits);

  // Level picked from the leading zeros of `level_hash`.
  static std::uint32_t level_for(std::uint64_t level_hash, std::uint32_t levels) noexcept;

  void insert(std::uint64_t key, std::uint64_t level_seed, std::uint64_t bit_seed) noexcept;
  void insert_at(std::uint32_t level, std::uint64_t key, std::uint64_t bit_seed) noexcept {
    levels_[level].insert(key, bit_seed);
  }

  double estimate() const noexcept;
  void reset() noexcept;

  std::uint32_t level_count() const noexcept { return static_cast<std::uint32_t>(levels_.size()); }
  const Bitmap& level(std::uint32_t n) const { return levels_.at(n); }
  std::uint32_t size_bytes() const noexcept {
    return level_count() * levels_.front().size_bytes();
  }

 private:
  std::vector<Bitmap> levels_;
};

}  // namespace segsketch
