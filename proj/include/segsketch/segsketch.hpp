#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "segsketch/address.hpp"
#include "segsketch/bitmap.hpp"
#include "segsketch/prefix_inference.hpp"

namespace segsketch {

// Spreader: the source is the host key and the destination its peer.
// Receiver: the roles swap.
enum class Direction { Spreader, Receiver };

struct HostPeer {
  Address host;
  Address peer;
};

inline HostPeer orient(Direction dir, Address src, Address dst) noexcept {
  return dir == Direction::Spreader ? HostPeer{src, dst} : HostPeer{dst, src};
}

const char* to_string(Direction dir) noexcept;
std::optional<Direction> parse_direction(std::string_view text) noexcept;

inline constexpr int kMaxRows = 16;

struct SketchConfig {
  std::size_t memory_budget_bytes = 64 * 1024;
  int rows = 3;
  std::uint32_t host_bitmap_bits = 4096;  // 0.5 KB
  SegmentConfig segment = SegmentConfig::with_width(4);
  double theta = 0.5;
  Direction direction = Direction::Spreader;
  bool clear_host_on_replace = false;
  // Row hashes, segment hash and host-bitmap hash all derive from `seed`;
  // the replacement coin flips use `rng_seed`.
  std::uint64_t seed = 0x5e65'5ce7ULL;
  std::uint64_t rng_seed = 1;

  // 4-byte key + subnet bitmap + host bitmap.
  std::size_t bucket_bytes() const noexcept {
    return 4 + segment.size_bytes() + host_bitmap_bits / 8;
  }
  std::uint32_t columns() const noexcept;

  void validate() const;
};

struct Bucket {
  Address host = 0;
  bool occupied = false;
  SubnetBitmap subnet;
  Bitmap host_bitmap;
};

enum class UpdateOutcome { Existing, InsertedEmpty, Replaced, Dropped };

struct QueryResult {
  double estimate;
  int inferred_prefix;
};

struct DetectionEntry {
  Address host;
  int inferred_prefix;
  double estimate;
  double threshold;
  int row;
  std::uint32_t col;
};

// Replacement law: 1 / (estimate + 1).
inline double replacement_probability(double estimate) noexcept { return 1.0 / (estimate + 1.0); }

// T(p) = theta * 2^(32 - p).
double detection_threshold(int prefix_bits, double theta) noexcept;

class SegSketch {
 public:
  explicit SegSketch(const SketchConfig& cfg);

  // Packet-level update; orients (src, dst) by the configured direction.
  UpdateOutcome update(Address src, Address dst) {
    const HostPeer hp = orient(cfg_.direction, src, dst);
    return insert(hp.host, hp.peer);
  }

  UpdateOutcome insert(Address host, Address peer);

  std::optional<QueryResult> query(Address host) const;

  std::vector<DetectionEntry> detect() const { return detect(cfg_.theta); }
  std::vector<DetectionEntry> detect(double theta) const;

  // Empties every bucket and rewinds the replacement RNG.
  void reset_epoch();

  const SketchConfig& config() const noexcept { return cfg_; }
  int rows() const noexcept { return cfg_.rows; }
  std::uint32_t columns() const noexcept { return columns_; }
  std::size_t allocated_bytes() const noexcept {
    return static_cast<std::size_t>(cfg_.rows) * columns_ * cfg_.bucket_bytes();
  }
  std::uint32_t column_for(int row, Address host) const noexcept;
  const Bucket& bucket(int row, std::uint32_t col) const {
    return buckets_.at(static_cast<std::size_t>(row) * columns_ + col);
  }

  // Snapshot plumbing.
  Bucket& mutable_bucket(int row, std::uint32_t col) {
    return buckets_.at(static_cast<std::size_t>(row) * columns_ + col);
  }
  std::string rng_state() const;
  void set_rng_state(const std::string& state);

 private:
  void install(Bucket& b, Address host, Address peer);
  double next_uniform() noexcept { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  SketchConfig cfg_;
  std::uint32_t columns_;
  std::vector<std::uint64_t> row_seeds_;
  std::uint64_t host_seed_;
  SegmentHasher hasher_;
  std::mt19937_64 rng_;
  std::vector<Bucket> buckets_;
};

}  // namespace segsketch
