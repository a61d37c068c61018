#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "segsketch/bitmap.hpp"
#include "segsketch/detector.hpp"
#include "segsketch/segsketch.hpp"

namespace segsketch {

// SegSketch with the subnet bitmap removed: peers are always hashed by full
// address and detection uses a flat cutoff. Buckets cost 4 + b/8 bytes.
class FullAddressSketch final : public Detector {
 public:
  struct Bucket {
    Address host = 0;
    bool occupied = false;
    Bitmap bitmap;
  };

  FullAddressSketch(const SketchConfig& cfg, double cutoff);

  std::string_view name() const noexcept override { return "fulladdr"; }
  void update(Address src, Address dst) override {
    const HostPeer hp = orient(cfg_.direction, src, dst);
    insert(hp.host, hp.peer);
  }
  UpdateOutcome insert(Address host, Address peer);
  std::optional<double> query(Address host) const;

  std::vector<HostReport> detect() const override { return detect(cutoff_); }
  std::vector<HostReport> detect(double cutoff) const;
  void reset() override;
  std::size_t memory_bytes() const noexcept override {
    return static_cast<std::size_t>(cfg_.rows) * columns_ * bucket_bytes();
  }

  std::size_t bucket_bytes() const noexcept { return 4 + cfg_.host_bitmap_bits / 8; }
  std::uint32_t columns() const noexcept { return columns_; }

 private:
  std::uint32_t column_for(int row, Address host) const noexcept;
  double next_uniform() noexcept { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  SketchConfig cfg_;
  double cutoff_;
  std::uint32_t columns_;
  std::vector<std::uint64_t> row_seeds_;
  std::uint64_t bitmap_seed_;
  std::mt19937_64 rng_;
  std::vector<Bucket> buckets_;
};

// SpreadSketch-style detector: every row's multi-scale bitmap absorbs every
// packet, and a bucket's candidate key follows the largest leading-zero rank
// seen since it was last replaced. A host's estimate is the minimum over its
// rows.
class SpreadSketchLite final : public Detector {
 public:
  struct Bucket {
    Address host = 0;
    int max_leading_zeros = -1;
    MultiScaleBitmap msb;
  };

  SpreadSketchLite(const SketchConfig& cfg, double cutoff, std::uint32_t levels = 8,
                   std::uint32_t level_bits = 512);

  // Candidate replacement rule: ties replace.
  static bool replaces(int leading_zeros, int stored_max) noexcept { return leading_zeros >= stored_max; }

  std::string_view name() const noexcept override { return "spreadsketch"; }
  void update(Address src, Address dst) override {
    const HostPeer hp = orient(cfg_.direction, src, dst);
    insert(hp.host, hp.peer);
  }
  void insert(Address host, Address peer);
  double query(Address host) const;

  std::vector<HostReport> detect() const override { return detect(cutoff_); }
  std::vector<HostReport> detect(double cutoff) const;
  void reset() override;
  std::size_t memory_bytes() const noexcept override {
    return static_cast<std::size_t>(cfg_.rows) * columns_ * bucket_bytes();
  }

  // Key + one-byte rank + levels.
  std::size_t bucket_bytes() const noexcept { return 4 + 1 + static_cast<std::size_t>(levels_) * level_bits_ / 8; }
  std::uint32_t columns() const noexcept { return columns_; }
  std::uint32_t column_for(int row, Address host) const noexcept;
  const Bucket& bucket(int row, std::uint32_t col) const {
    return buckets_.at(static_cast<std::size_t>(row) * columns_ + col);
  }
  // Rank hash of a (host, peer) pair; also selects the level.
  std::uint64_t pair_hash(Address host, Address peer) const noexcept;

 private:
  SketchConfig cfg_;
  double cutoff_;
  std::uint32_t levels_;
  std::uint32_t level_bits_;
  std::uint32_t columns_;
  std::vector<std::uint64_t> row_seeds_;
  std::uint64_t level_seed_;
  std::uint64_t bit_seed_;
  std::vector<Bucket> buckets_;
};

// Multi-layer detector in the spirit of RHHH. Layer p keeps one Linear
// Counting bitmap per (host, p-bit peer prefix) and counts distinct
// (32 - p)-bit peer suffixes; p = 0 is the full-address layer. Each layer
// gets a quarter of the budget; a full layer evicts its minimum-estimate
// entry to admit a new key.
class HierarchicalLC final : public Detector {
 public:
  static constexpr int kLayerPrefixes[] = {0, 8, 16, 24};
  static constexpr int kLayers = 4;

  struct Entry {
    Address host;
    Address prefix;
    Bitmap bitmap;
  };

  HierarchicalLC(const SketchConfig& cfg, std::uint32_t layer_bitmap_bits = 0);

  std::string_view name() const noexcept override { return "hierlc"; }
  void update(Address src, Address dst) override {
    const HostPeer hp = orient(cfg_.direction, src, dst);
    insert(hp.host, hp.peer);
  }
  void insert(Address host, Address peer);

  // Estimate held by layer `layer` for (host, prefix of peer), if tracked.
  std::optional<double> layer_estimate(int layer, Address host, Address peer) const;

  std::vector<HostReport> detect() const override { return detect(cfg_.theta); }
  std::vector<HostReport> detect(double theta) const;
  void reset() override;
  std::size_t memory_bytes() const noexcept override {
    return static_cast<std::size_t>(kLayers) * capacity_ * entry_bytes();
  }

  std::size_t entry_bytes() const noexcept { return 8 + bitmap_bits_ / 8; }
  std::size_t layer_capacity() const noexcept { return capacity_; }
  std::uint32_t layer_bitmap_bits() const noexcept { return bitmap_bits_; }
  // Evictions forced by full layers since the last reset.
  std::uint64_t overflow_count() const noexcept { return overflows_; }

 private:
  struct Layer {
    std::vector<Entry> entries;
    std::unordered_map<std::uint64_t, std::uint32_t> index;
  };

  static std::uint64_t entry_key(Address host, Address prefix) noexcept {
    return (static_cast<std::uint64_t>(host) << 32) | prefix;
  }

  SketchConfig cfg_;
  std::uint32_t bitmap_bits_;
  std::size_t capacity_;
  std::uint64_t bitmap_seed_;
  std::uint64_t overflows_ = 0;
  std::vector<Layer> layers_;
};

}  // namespace segsketch
