#include "segsketch/baselines.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <map>
#include <unordered_set>

#include "segsketch/errors.hpp"
#include "segsketch/hash.hpp"
#include "segsketch/prefix_inference.hpp"

namespace segsketch {

namespace {

constexpr std::uint64_t kBitmapStream = 2001;
constexpr std::uint64_t kLevelStream = 2002;
constexpr std::uint64_t kRngStream = 1002;

std::vector<std::uint64_t> row_seeds(const SketchConfig& cfg) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < cfg.rows; ++i) seeds.push_back(derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));
  return seeds;
}

std::uint32_t columns_for(const SketchConfig& cfg, std::size_t bucket_bytes) {
  if (cfg.rows < 1 || cfg.rows > kMaxRows) throw InvalidConfig("rows must lie in [1, 16]");
  const auto c = static_cast<std::uint32_t>(cfg.memory_budget_bytes /
                                            (static_cast<std::size_t>(cfg.rows) * bucket_bytes));
  if (c < 1) throw InvalidConfig("memory budget cannot hold one column of buckets");
  return c;
}

Address prefix_of(Address addr, int prefix_bits) noexcept {
  return prefix_bits == 0 ? 0 : addr >> (32 - prefix_bits);
}

}  // namespace

// ---------------------------------------------------------------------------
// FullAddressSketch

FullAddressSketch::FullAddressSketch(const SketchConfig& cfg, double cutoff)
    : cfg_(cfg),
      cutoff_(cutoff),
      columns_(columns_for(cfg, 4 + cfg.host_bitmap_bits / 8)),
      row_seeds_(row_seeds(cfg)),
      bitmap_seed_(derive_seed(cfg.seed, kBitmapStream)),
      rng_(derive_seed(cfg.rng_seed, kRngStream)) {
  buckets_.assign(static_cast<std::size_t>(cfg_.rows) * columns_, Bucket{0, false, Bitmap(cfg_.host_bitmap_bits)});
}

std::uint32_t FullAddressSketch::column_for(int row, Address host) const noexcept {
  return reduce(hash64(host, row_seeds_[static_cast<std::size_t>(row)]), columns_);
}

UpdateOutcome FullAddressSketch::insert(Address host, Address peer) {
  std::array<Bucket*, kMaxRows> hashed{};
  Bucket* first_empty = nullptr;
  for (int i = 0; i < cfg_.rows; ++i) {
    Bucket& b = buckets_[static_cast<std::size_t>(i) * columns_ + column_for(i, host)];
    if (b.occupied && b.host == host) {
      b.bitmap.insert(peer, bitmap_seed_);
      return UpdateOutcome::Existing;
    }
    if (!b.occupied && first_empty == nullptr) first_empty = &b;
    hashed[static_cast<std::size_t>(i)] = &b;
  }
  Bucket* target = first_empty;
  UpdateOutcome outcome = UpdateOutcome::InsertedEmpty;
  if (target == nullptr) {
    target = hashed[0];
    for (int i = 1; i < cfg_.rows; ++i) {
      Bucket* b = hashed[static_cast<std::size_t>(i)];
      if (b->bitmap.set_count() < target->bitmap.set_count()) target = b;
    }
    if (next_uniform() >= replacement_probability(target->bitmap.estimate())) return UpdateOutcome::Dropped;
    if (cfg_.clear_host_on_replace) target->bitmap.reset();
    outcome = UpdateOutcome::Replaced;
  }
  target->host = host;
  target->occupied = true;
  target->bitmap.insert(peer, bitmap_seed_);
  return outcome;
}

std::optional<double> FullAddressSketch::query(Address host) const {
  for (int i = 0; i < cfg_.rows; ++i) {
    const Bucket& b = buckets_[static_cast<std::size_t>(i) * columns_ + column_for(i, host)];
    if (b.occupied && b.host == host) return b.bitmap.estimate();
  }
  return std::nullopt;
}

std::vector<HostReport> FullAddressSketch::detect(double cutoff) const {
  std::vector<HostReport> out;
  for (const Bucket& b : buckets_) {
    if (!b.occupied) continue;
    const double estimate = b.bitmap.estimate();
    if (estimate > cutoff) out.push_back({b.host, estimate, 0, cutoff});
  }
  return out;
}

void FullAddressSketch::reset() {
  for (Bucket& b : buckets_) {
    b.host = 0;
    b.occupied = false;
    b.bitmap.reset();
  }
  rng_.seed(derive_seed(cfg_.rng_seed, kRngStream));
}

// ---------------------------------------------------------------------------
// SpreadSketchLite

SpreadSketchLite::SpreadSketchLite(const SketchConfig& cfg, double cutoff, std::uint32_t levels,
                                   std::uint32_t level_bits)
    : cfg_(cfg),
      cutoff_(cutoff),
      levels_(levels),
      level_bits_(level_bits),
      columns_(columns_for(cfg, 5 + static_cast<std::size_t>(levels) * level_bits / 8)),
      row_seeds_(row_seeds(cfg)),
      level_seed_(derive_seed(cfg.seed, kLevelStream)),
      bit_seed_(derive_seed(cfg.seed, kBitmapStream)) {
  buckets_.assign(static_cast<std::size_t>(cfg_.rows) * columns_, Bucket{0, -1, MultiScaleBitmap(levels, level_bits)});
}

std::uint32_t SpreadSketchLite::column_for(int row, Address host) const noexcept {
  return reduce(hash64(host, row_seeds_[static_cast<std::size_t>(row)]), columns_);
}

std::uint64_t SpreadSketchLite::pair_hash(Address host, Address peer) const noexcept {
  return hash64((static_cast<std::uint64_t>(host) << 32) | peer, level_seed_);
}

void SpreadSketchLite::insert(Address host, Address peer) {
  const std::uint64_t pair = (static_cast<std::uint64_t>(host) << 32) | peer;
  const std::uint64_t h = pair_hash(host, peer);
  const int lz = std::countl_zero(h);
  const std::uint32_t level = MultiScaleBitmap::level_for(h, levels_);
  for (int i = 0; i < cfg_.rows; ++i) {
    Bucket& b = buckets_[static_cast<std::size_t>(i) * columns_ + column_for(i, host)];
    b.msb.insert_at(level, pair, bit_seed_);
    if (replaces(lz, b.max_leading_zeros)) {
      b.host = host;
      b.max_leading_zeros = lz;
    }
  }
}

double SpreadSketchLite::query(Address host) const {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cfg_.rows; ++i) best = std::min(best, bucket(i, column_for(i, host)).msb.estimate());
  return best;
}

std::vector<HostReport> SpreadSketchLite::detect(double cutoff) const {
  std::vector<HostReport> out;
  std::unordered_set<Address> seen;
  for (const Bucket& b : buckets_) {
    if (b.max_leading_zeros < 0 || !seen.insert(b.host).second) continue;
    const double estimate = query(b.host);
    if (estimate > cutoff) out.push_back({b.host, estimate, 0, cutoff});
  }
  return out;
}

void SpreadSketchLite::reset() {
  for (Bucket& b : buckets_) {
    b.host = 0;
    b.max_leading_zeros = -1;
    b.msb.reset();
  }
}

// ---------------------------------------------------------------------------
// HierarchicalLC

HierarchicalLC::HierarchicalLC(const SketchConfig& cfg, std::uint32_t layer_bitmap_bits)
    : cfg_(cfg),
      bitmap_bits_(layer_bitmap_bits ? layer_bitmap_bits : cfg.host_bitmap_bits / 4),
      capacity_(0),
      bitmap_seed_(derive_seed(cfg.seed, kBitmapStream)),
      layers_(kLayers) {
  if (bitmap_bits_ < 8 || bitmap_bits_ % 8 != 0) throw InvalidConfig("layer bitmap size must be a multiple of 8 bits");
  if (!(cfg.theta > 0.0 && cfg.theta <= 1.0)) throw InvalidConfig("theta must lie in (0, 1]");
  capacity_ = cfg.memory_budget_bytes / kLayers / entry_bytes();
  if (capacity_ < 1) throw InvalidConfig("memory budget cannot hold one entry per layer");
  for (Layer& layer : layers_) {
    layer.entries.reserve(capacity_);
    layer.index.reserve(capacity_ * 2);
  }
}

void HierarchicalLC::insert(Address host, Address peer) {
  for (int l = 0; l < kLayers; ++l) {
    const int p = kLayerPrefixes[l];
    Layer& layer = layers_[static_cast<std::size_t>(l)];
    const std::uint64_t key = entry_key(host, prefix_of(peer, p));
    auto it = layer.index.find(key);
    std::uint32_t slot;
    if (it != layer.index.end()) {
      slot = it->second;
    } else if (layer.entries.size() < capacity_) {
      slot = static_cast<std::uint32_t>(layer.entries.size());
      layer.entries.push_back({host, prefix_of(peer, p), Bitmap(bitmap_bits_)});
      layer.index.emplace(key, slot);
    } else {
      // Layer overflow: evict the minimum-estimate entry.
      ++overflows_;
      slot = 0;
      for (std::uint32_t i = 1; i < layer.entries.size(); ++i) {
        if (layer.entries[i].bitmap.set_count() < layer.entries[slot].bitmap.set_count()) slot = i;
      }
      Entry& victim = layer.entries[slot];
      layer.index.erase(entry_key(victim.host, victim.prefix));
      victim.host = host;
      victim.prefix = prefix_of(peer, p);
      victim.bitmap.reset();
      layer.index.emplace(key, slot);
    }
    layer.entries[slot].bitmap.insert(host_suffix(peer, p).key(), bitmap_seed_);
  }
}

std::optional<double> HierarchicalLC::layer_estimate(int layer, Address host, Address peer) const {
  const Layer& l = layers_.at(static_cast<std::size_t>(layer));
  auto it = l.index.find(entry_key(host, prefix_of(peer, kLayerPrefixes[layer])));
  if (it == l.index.end()) return std::nullopt;
  return l.entries[it->second].bitmap.estimate();
}

std::vector<HostReport> HierarchicalLC::detect(double theta) const {
  // Longest qualifying prefix wins per host; layers run shortest to longest.
  std::map<Address, HostReport> best;
  for (int l = 0; l < kLayers; ++l) {
    const int p = kLayerPrefixes[l];
    const double threshold = detection_threshold(p, theta);
    for (const Entry& e : layers_[static_cast<std::size_t>(l)].entries) {
      const double estimate = e.bitmap.estimate();
      if (estimate <= threshold) continue;
      const HostReport candidate{e.host, estimate, p, threshold};
      auto [it, inserted] = best.try_emplace(e.host, candidate);
      if (inserted) continue;
      const HostReport& cur = it->second;
      if (p > cur.prefix_bits || (p == cur.prefix_bits && estimate > cur.estimate)) it->second = candidate;
    }
  }
  std::vector<HostReport> out;
  out.reserve(best.size());
  for (auto& [host, report] : best) out.push_back(report);
  return out;
}

void HierarchicalLC::reset() {
  for (Layer& layer : layers_) {
    layer.entries.clear();
    layer.index.clear();
  }
  overflows_ = 0;
}

}  // namespace segsketch
