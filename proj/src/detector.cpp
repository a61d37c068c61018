#include "segsketch/detector.hpp"

#include "segsketch/baselines.hpp"
#include "segsketch/errors.hpp"

namespace segsketch {

const char* to_string(DetectorKind kind) noexcept {
  switch (kind) {
    case DetectorKind::SegSketch: return "segsketch";
    case DetectorKind::FullAddress: return "fulladdr";
    case DetectorKind::SpreadSketch: return "spreadsketch";
    case DetectorKind::HierLC: return "hierlc";
  }
  return "?";
}

std::optional<DetectorKind> parse_detector_kind(std::string_view name) noexcept {
  if (name == "segsketch") return DetectorKind::SegSketch;
  if (name == "fulladdr") return DetectorKind::FullAddress;
  if (name == "spreadsketch") return DetectorKind::SpreadSketch;
  if (name == "hierlc") return DetectorKind::HierLC;
  return std::nullopt;
}

std::vector<HostReport> SegSketchDetector::detect() const {
  std::vector<HostReport> out;
  for (const DetectionEntry& e : sketch_.detect()) {
    out.push_back({e.host, e.estimate, e.inferred_prefix, e.threshold});
  }
  return out;
}

std::unique_ptr<Detector> make_detector(const DetectorConfig& cfg) {
  auto need_cutoff = [&]() {
    if (!cfg.cutoff) {
      throw InvalidConfig(std::string(to_string(cfg.kind)) + " needs a flat cardinality cutoff");
    }
    return *cfg.cutoff;
  };
  switch (cfg.kind) {
    case DetectorKind::SegSketch:
      return std::make_unique<SegSketchDetector>(cfg.sketch);
    case DetectorKind::FullAddress:
      return std::make_unique<FullAddressSketch>(cfg.sketch, need_cutoff());
    case DetectorKind::SpreadSketch:
      return std::make_unique<SpreadSketchLite>(cfg.sketch, need_cutoff(), cfg.msb_levels, cfg.msb_level_bits);
    case DetectorKind::HierLC:
      return std::make_unique<HierarchicalLC>(cfg.sketch, cfg.layer_bitmap_bits);
  }
  throw InvalidConfig("unknown detector kind");
}

}  // namespace segsketch
