#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "segsketch/address.hpp"
#include "segsketch/segsketch.hpp"

namespace segsketch {

// One reported host. `prefix_bits` is the subnet prefix the estimate refers
// to (0 for detectors that only see full addresses).
struct HostReport {
  Address host;
  double estimate;
  int prefix_bits;
  double threshold;
};

// Common surface the evaluation harness drives.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::string_view name() const noexcept = 0;
  virtual void update(Address src, Address dst) = 0;
  virtual std::vector<HostReport> detect() const = 0;
  virtual void reset() = 0;
  virtual std::size_t memory_bytes() const noexcept = 0;
};

enum class DetectorKind { SegSketch, FullAddress, SpreadSketch, HierLC };

const char* to_string(DetectorKind kind) noexcept;
std::optional<DetectorKind> parse_detector_kind(std::string_view name) noexcept;

struct DetectorConfig {
  DetectorKind kind = DetectorKind::SegSketch;
  // Budget, rows, host bitmap, segment layout, theta, direction and seeds.
  // Baselines read the fields that apply to them.
  SketchConfig sketch;
  // Flat cardinality cutoff; required by fulladdr and spreadsketch.
  std::optional<double> cutoff;
  std::uint32_t msb_levels = 8;
  std::uint32_t msb_level_bits = 512;
  // 0 selects host_bitmap_bits / 4.
  std::uint32_t layer_bitmap_bits = 0;
};

std::unique_ptr<Detector> make_detector(const DetectorConfig& cfg);

class SegSketchDetector final : public Detector {
 public:
  explicit SegSketchDetector(const SketchConfig& cfg) : sketch_(cfg) {}

  std::string_view name() const noexcept override { return "segsketch"; }
  void update(Address src, Address dst) override { sketch_.update(src, dst); }
  std::vector<HostReport> detect() const override;
  void reset() override { sketch_.reset_epoch(); }
  std::size_t memory_bytes() const noexcept override { return sketch_.allocated_bytes(); }

  const SegSketch& sketch() const noexcept { return sketch_; }

 private:
  SegSketch sketch_;
};

}  // namespace segsketch
