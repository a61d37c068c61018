#pragma once

#include <filesystem>

#include "json.hpp"
#include "segsketch/segsketch.hpp"

namespace segsketch {

// Snapshot layout (JSON):
//   {"format": "segsketch-snapshot", "version": 1,
//    "config": {...SketchConfig fields...},
//    "rng_state": "<mt19937_64 text state>",
//    "buckets": [{"row", "col", "host", "subnet", "host_bitmap"}, ...]}
// Only occupied buckets are listed. Bitmaps are hex strings, 16 digits per
// 64-bit word, lowest word first.
nlohmann::json to_snapshot(const SegSketch& sketch);
SegSketch from_snapshot(const nlohmann::json& snapshot);

nlohmann::json config_to_json(const SketchConfig& cfg);
SketchConfig config_from_json(const nlohmann::json& j);

void save_snapshot(const SegSketch& sketch, const std::filesystem::path& path);
SegSketch load_snapshot(const std::filesystem::path& path);

}  // namespace segsketch
