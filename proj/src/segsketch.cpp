#include "segsketch/segsketch.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "segsketch/errors.hpp"
#include "segsketch/hash.hpp"

namespace segsketch {

namespace {

// Stream ids for seeds derived from SketchConfig::seed. Row i uses stream i.
constexpr std::uint64_t kSegmentStream = 1000;
constexpr std::uint64_t kHostStream = 1001;
constexpr std::uint64_t kRngStream = 1002;

}  // namespace

const char* to_string(Direction dir) noexcept {
  return dir == Direction::Spreader ? "spreader" : "receiver";
}

std::optional<Direction> parse_direction(std::string_view text) noexcept {
  if (text == "spreader") return Direction::Spreader;
  if (text == "receiver") return Direction::Receiver;
  return std::nullopt;
}

double detection_threshold(int prefix_bits, double theta) noexcept {
  return theta * std::ldexp(1.0, 32 - prefix_bits);
}

std::uint32_t SketchConfig::columns() const noexcept {
  if (rows <= 0) return 0;
  return static_cast<std::uint32_t>(memory_budget_bytes / (static_cast<std::size_t>(rows) * bucket_bytes()));
}

void SketchConfig::validate() const {
  segment.validate();
  if (rows < 1 || rows > kMaxRows) throw InvalidConfig("rows must lie in [1, 16]");
  if (host_bitmap_bits < 8 || host_bitmap_bits % 8 != 0) {
    throw InvalidConfig("host bitmap size must be a positive multiple of 8 bits");
  }
  if (!(theta > 0.0 && theta <= 1.0)) throw InvalidConfig("theta must lie in (0, 1]");
  if (columns() < 1) {
    throw InvalidConfig("memory budget of " + std::to_string(memory_budget_bytes) +
                        " bytes cannot hold one column of " + std::to_string(rows) + " buckets of " +
                        std::to_string(bucket_bytes()) + " bytes");
  }
}

SegSketch::SegSketch(const SketchConfig& cfg)
    : cfg_((cfg.validate(), cfg)),
      columns_(cfg_.columns()),
      host_seed_(derive_seed(cfg_.seed, kHostStream)),
      hasher_(cfg_.segment, derive_seed(cfg_.seed, kSegmentStream)),
      rng_(derive_seed(cfg_.rng_seed, kRngStream)) {
  row_seeds_.reserve(static_cast<std::size_t>(cfg_.rows));
  for (int i = 0; i < cfg_.rows; ++i) row_seeds_.push_back(derive_seed(cfg_.seed, static_cast<std::uint64_t>(i)));
  const Bucket empty{0, false, SubnetBitmap(cfg_.segment), Bitmap(cfg_.host_bitmap_bits)};
  buckets_.assign(static_cast<std::size_t>(cfg_.rows) * columns_, empty);
}

std::uint32_t SegSketch::column_for(int row, Address host) const noexcept {
  return reduce(hash64(host, row_seeds_[static_cast<std::size_t>(row)]), columns_);
}

void SegSketch::install(Bucket& b, Address host, Address peer) {
  b.host = host;
  b.occupied = true;
  b.subnet.insert(peer, hasher_);
  // The prefix is unknown on first arrival, so the full peer address is hashed.
  b.host_bitmap.insert(host_suffix(peer, 0).key(), host_seed_);
}

UpdateOutcome SegSketch::insert(Address host, Address peer) {
  std::array<Bucket*, kMaxRows> hashed{};
  Bucket* first_empty = nullptr;
  const int r = cfg_.rows;
  for (int i = 0; i < r; ++i) {
    Bucket& b = buckets_[static_cast<std::size_t>(i) * columns_ + column_for(i, host)];
    if (b.occupied && b.host == host) {
      // Host already tracked: refine the prefix, then hash the peer's host part under it.
      // Divergence at depth k leaves every set cell under the depth k-1 path,
      // so the prefix is (k - 1) * G without a second walk.
      const int p = (b.subnet.insert(peer, hasher_) - 1) * cfg_.segment.width;
      b.host_bitmap.insert(host_suffix(peer, p).key(), host_seed_);
      return UpdateOutcome::Existing;
    }
    if (!b.occupied && first_empty == nullptr) first_empty = &b;
    hashed[static_cast<std::size_t>(i)] = &b;
  }

  if (first_empty != nullptr) {
    // Free bucket.
    install(*first_empty, host, peer);
    return UpdateOutcome::InsertedEmpty;
  }

  // Every row taken: probabilistic replacement of the smallest-estimate bucket. For a
  // fixed bitmap size the estimate is monotone in the set count.
  Bucket* victim = hashed[0];
  for (int i = 1; i < r; ++i) {
    Bucket* b = hashed[static_cast<std::size_t>(i)];
    if (b->host_bitmap.set_count() < victim->host_bitmap.set_count()) victim = b;
  }
  if (next_uniform() >= replacement_probability(victim->host_bitmap.estimate())) {
    return UpdateOutcome::Dropped;
  }
  victim->subnet.reset();
  if (cfg_.clear_host_on_replace) victim->host_bitmap.reset();
  install(*victim, host, peer);
  return UpdateOutcome::Replaced;
}

std::optional<QueryResult> SegSketch::query(Address host) const {
  for (int i = 0; i < cfg_.rows; ++i) {
    const Bucket& b = bucket(i, column_for(i, host));
    if (b.occupied && b.host == host) return QueryResult{b.host_bitmap.estimate(), b.subnet.derive_prefix()};
  }
  return std::nullopt;
}

std::vector<DetectionEntry> SegSketch::detect(double theta) const {
  std::vector<DetectionEntry> out;
  for (int i = 0; i < cfg_.rows; ++i) {
    for (std::uint32_t j = 0; j < columns_; ++j) {
      const Bucket& b = bucket(i, j);
      if (!b.occupied) continue;
      const int p = b.subnet.derive_prefix();
      const double estimate = b.host_bitmap.estimate();
      const double threshold = detection_threshold(p, theta);
      if (estimate > threshold) out.push_back({b.host, p, estimate, threshold, i, j});
    }
  }
  return out;
}

void SegSketch::reset_epoch() {
  for (Bucket& b : buckets_) {
    b.host = 0;
    b.occupied = false;
    b.subnet.reset();
    b.host_bitmap.reset();
  }
  rng_.seed(derive_seed(cfg_.rng_seed, kRngStream));
}

std::string SegSketch::rng_state() const {
  std::ostringstream os;
  os << rng_;
  return os.str();
}

void SegSketch::set_rng_state(const std::string& state) {
  std::istringstream is(state);
  is >> rng_;
  if (!is) throw InvalidConfig("malformed RNG state");
}

}  // namespace segsketch
