#include "segsketch/prefix_inference.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <stdexcept>

#include "segsketch/errors.hpp"
#include "segsketch/hash.hpp"

namespace segsketch {

SegmentConfig SegmentConfig::with_width(int width, int max_depth, bool level_salt) {
  SegmentConfig cfg;
  cfg.width = width;
  cfg.level_salt = level_salt;
  cfg.depth = std::min(cfg.segment_count() - 1, max_depth);
  cfg.validate();
  return cfg;
}

void SegmentConfig::validate() const {
  if (width != 2 && width != 4 && width != 6 && width != 8) {
    throw InvalidConfig("segment width G must be one of 2, 4, 6, 8");
  }
  if (depth < 1 || depth > segment_count() - 1) {
    throw InvalidConfig("subnet bitmap depth must lie in [1, V-1]");
  }
}

SegmentedAddress segment_address(Address addr, const SegmentConfig& cfg) {
  const int v = cfg.segment_count();
  SegmentedAddress out;
  out.segments.reserve(static_cast<std::size_t>(v));
  for (int i = 1; i < v; ++i) out.segments.push_back({segment_value(addr, i, cfg.width), cfg.width});
  const int tail = 32 - (v - 1) * cfg.width;
  out.segments.push_back({addr & static_cast<std::uint32_t>((std::uint64_t{1} << tail) - 1), tail});
  return out;
}

SegmentHasher::SegmentHasher(const SegmentConfig& cfg, std::uint64_t seed)
    : seed_(seed), stride_(std::size_t{1} << cfg.width) {
  const int levels = cfg.segment_count();
  table_.resize(static_cast<std::size_t>(levels) * stride_);
  for (int level = 1; level <= levels; ++level) {
    for (std::uint32_t value = 0; value < stride_; ++value) {
      std::uint64_t input = value;
      if (cfg.level_salt) input ^= static_cast<std::uint64_t>(level) << 32;
      table_[static_cast<std::size_t>(level - 1) * stride_ + value] =
          static_cast<std::uint8_t>(hash64(input, seed) & 1u);
    }
  }
}

SubnetBitmap::SubnetBitmap(const SegmentConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  words_.assign((cfg_.cells() + 63) / 64, 0);
}

bool SubnetBitmap::any_slow(std::uint32_t lo, std::uint32_t hi) const noexcept {
  std::uint32_t first = lo >> 6;
  const std::uint32_t last = (hi - 1) >> 6;
  const std::uint64_t head = ~std::uint64_t{0} << (lo & 63);
  const std::uint64_t tail = ~std::uint64_t{0} >> (63 - ((hi - 1) & 63));
  if (first == last) return (words_[first] & head & tail) != 0;
  if (words_[first] & head) return true;
  for (++first; first < last; ++first) {
    if (words_[first]) return true;
  }
  return (words_[last] & tail) != 0;
}

int SubnetBitmap::insert(Address addr, const SegmentHasher& hasher) noexcept {
  std::uint32_t lo = 0;
  std::uint32_t hi = cfg_.cells();
  for (int d = 1; d <= cfg_.depth; ++d) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    if (hasher.bit(d, segment_value(addr, d, cfg_.width))) {
      if (any(lo, mid)) {
        set(mid);
        return d;
      }
      lo = mid;
    } else {
      if (any(mid, hi)) {
        set(lo);
        return d;
      }
      hi = mid;
    }
  }
  set(lo);
  return cfg_.depth + 1;
}

int SubnetBitmap::derive_prefix() const {
  std::uint32_t lo = 0;
  std::uint32_t hi = cfg_.cells();
  for (int d = 1; d <= cfg_.depth; ++d) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    const bool left = any(lo, mid);
    const bool right = any(mid, hi);
    if (left && right) return (d - 1) * cfg_.width;
    if (left) {
      hi = mid;
    } else if (right) {
      lo = mid;
    } else {
      // Only reachable at the root; set cells below an ancestor always lie
      // on some walked path.
      assert(d == 1);
      throw EmptyBitmap();
    }
  }
  return cfg_.max_prefix_bits();
}

bool SubnetBitmap::empty() const noexcept {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

std::uint32_t SubnetBitmap::count() const noexcept {
  std::uint32_t n = 0;
  for (auto w : words_) n += static_cast<std::uint32_t>(std::popcount(w));
  return n;
}

void SubnetBitmap::reset() noexcept { std::fill(words_.begin(), words_.end(), 0); }

void SubnetBitmap::assign_words(std::span<const std::uint64_t> words) {
  if (words.size() != words_.size()) throw InvalidConfig("subnet bitmap word count mismatch");
  const std::uint32_t cells = cfg_.cells();
  if (cells < 64 && (words[0] >> cells) != 0) throw InvalidConfig("subnet bitmap has bits past its size");
  std::copy(words.begin(), words.end(), words_.begin());
}

}  // namespace segsketch
