#include "segsketch/bitmap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "segsketch/errors.hpp"
#include "segsketch/hash.hpp"

namespace segsketch {

double lc_estimate(std::uint32_t size_bits, std::uint32_t zero_count) noexcept {
  const double b = size_bits;
  const double z = std::max<std::uint32_t>(zero_count, 1);
  return b * std::log(b / z);
}

Bitmap::Bitmap(std::uint32_t size_bits) : size_bits_(size_bits) {
  if (size_bits < 8 || size_bits % 8 != 0) {
    throw InvalidConfig("bitmap size must be a multiple of 8 bits and at least 8");
  }
  words_.assign((size_bits + 63) / 64, 0);
}

void Bitmap::insert(std::uint64_t key, std::uint64_t seed) noexcept {
  set(reduce(hash64(key, seed), size_bits_));
}

void Bitmap::reset() noexcept {
  std::fill(words_.begin(), words_.end(), 0);
  set_count_ = 0;
}

void Bitmap::assign_words(std::span<const std::uint64_t> words) {
  if (words.size() != words_.size()) throw InvalidConfig("bitmap word count mismatch");
  std::uint32_t count = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::uint64_t w = words[i];
    const std::uint32_t base = static_cast<std::uint32_t>(i * 64);
    if (base + 64 > size_bits_) {
      const std::uint32_t valid = size_bits_ - base;
      if (valid < 64 && (w >> valid) != 0) throw InvalidConfig("bitmap has bits past its size");
    }
    words_[i] = w;
    count += static_cast<std::uint32_t>(std::popcount(w));
  }
  set_count_ = count;
}

MultiScaleBitmap::MultiScaleBitmap(std::uint32_t levels, std::uint32_t level_bits) {
  if (levels == 0 || levels > 64) throw InvalidConfig("multi-scale bitmap needs 1..64 levels");
  levels_.assign(levels, Bitmap(level_bits));
}

std::uint32_t MultiScaleBitmap::level_for(std::uint64_t level_hash, std::uint32_t levels) noexcept {
  const auto lz = static_cast<std::uint32_t>(std::countl_zero(level_hash));
  return std::min(lz, levels - 1);
}

void MultiScaleBitmap::insert(std::uint64_t key, std::uint64_t level_seed,
                              std::uint64_t bit_seed) noexcept {
  insert_at(level_for(hash64(key, level_seed), level_count()), key, bit_seed);
}

double MultiScaleBitmap::estimate() const noexcept {
  const std::uint32_t n = level_count();
  // Levels base..n-1 jointly receive a 2^-base share of all keys.
  std::uint32_t base = n;
  while (base > 0 && levels_[base - 1].zero_count() * 4 > levels_[base - 1].size_bits()) {
    --base;
  }
  if (base == n) base = n - 1;  // top level saturated; fall back to its clamped estimate

  double sum = 0.0;
  for (std::uint32_t level = base; level < n; ++level) sum += levels_[level].estimate();
  return std::ldexp(sum, static_cast<int>(base));
}

void MultiScaleBitmap::reset() noexcept {
  for (auto& level : levels_) level.reset();
}

}  // namespace segsketch
