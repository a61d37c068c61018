#include "segsketch/snapshot.hpp"

#include <cstdio>
#include <fstream>
#include <vector>

#include "segsketch/errors.hpp"

namespace segsketch {

namespace {

std::string to_hex(std::span<const std::uint64_t> words) {
  std::string out;
  out.reserve(words.size() * 16);
  char buf[17];
  for (auto w : words) {
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(w));
    out += buf;
  }
  return out;
}

std::vector<std::uint64_t> from_hex(const std::string& hex) {
  if (hex.size() % 16 != 0) throw InvalidConfig("snapshot bitmap hex length is not a multiple of 16");
  std::vector<std::uint64_t> words;
  words.reserve(hex.size() / 16);
  for (std::size_t i = 0; i < hex.size(); i += 16) {
    std::size_t used = 0;
    const std::string chunk = hex.substr(i, 16);
    const unsigned long long w = std::stoull(chunk, &used, 16);
    if (used != 16) throw InvalidConfig("snapshot bitmap hex is malformed");
    words.push_back(w);
  }
  return words;
}

}  // namespace

nlohmann::json config_to_json(const SketchConfig& cfg) {
  return {
      {"memory_budget_bytes", cfg.memory_budget_bytes},
      {"rows", cfg.rows},
      {"host_bitmap_bits", cfg.host_bitmap_bits},
      {"segment_width", cfg.segment.width},
      {"subnet_depth", cfg.segment.depth},
      {"level_salt", cfg.segment.level_salt},
      {"theta", cfg.theta},
      {"direction", to_string(cfg.direction)},
      {"clear_host_on_replace", cfg.clear_host_on_replace},
      {"seed", cfg.seed},
      {"rng_seed", cfg.rng_seed},
  };
}

SketchConfig config_from_json(const nlohmann::json& j) {
  SketchConfig cfg;
  cfg.memory_budget_bytes = j.at("memory_budget_bytes").get<std::size_t>();
  cfg.rows = j.at("rows").get<int>();
  cfg.host_bitmap_bits = j.at("host_bitmap_bits").get<std::uint32_t>();
  cfg.segment.width = j.at("segment_width").get<int>();
  cfg.segment.depth = j.at("subnet_depth").get<int>();
  cfg.segment.level_salt = j.at("level_salt").get<bool>();
  cfg.theta = j.at("theta").get<double>();
  auto dir = parse_direction(j.at("direction").get<std::string>());
  if (!dir) throw InvalidConfig("snapshot direction must be spreader or receiver");
  cfg.direction = *dir;
  cfg.clear_host_on_replace = j.at("clear_host_on_replace").get<bool>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  cfg.validate();
  return cfg;
}

nlohmann::json to_snapshot(const SegSketch& sketch) {
  nlohmann::json buckets = nlohmann::json::array();
  for (int i = 0; i < sketch.rows(); ++i) {
    for (std::uint32_t j = 0; j < sketch.columns(); ++j) {
      const Bucket& b = sketch.bucket(i, j);
      if (!b.occupied) continue;
      buckets.push_back({{"row", i},
                         {"col", j},
                         {"host", format_address(b.host)},
                         {"subnet", to_hex(b.subnet.words())},
                         {"host_bitmap", to_hex(b.host_bitmap.words())}});
    }
  }
  return {{"format", "segsketch-snapshot"},
          {"version", 1},
          {"config", config_to_json(sketch.config())},
          {"rng_state", sketch.rng_state()},
          {"buckets", std::move(buckets)}};
}

SegSketch from_snapshot(const nlohmann::json& snapshot) {
  if (snapshot.value("format", "") != "segsketch-snapshot" || snapshot.value("version", 0) != 1) {
    throw InvalidConfig("not a version-1 segsketch snapshot");
  }
  SegSketch sketch(config_from_json(snapshot.at("config")));
  sketch.set_rng_state(snapshot.at("rng_state").get<std::string>());
  for (const auto& jb : snapshot.at("buckets")) {
    const int row = jb.at("row").get<int>();
    const auto col = jb.at("col").get<std::uint32_t>();
    if (row < 0 || row >= sketch.rows() || col >= sketch.columns()) {
      throw InvalidConfig("snapshot bucket coordinates out of range");
    }
    auto host = parse_address(jb.at("host").get<std::string>());
    if (!host) throw InvalidConfig("snapshot bucket host is not an address");
    Bucket& b = sketch.mutable_bucket(row, col);
    b.host = *host;
    b.occupied = true;
    b.subnet.assign_words(from_hex(jb.at("subnet").get<std::string>()));
    b.host_bitmap.assign_words(from_hex(jb.at("host_bitmap").get<std::string>()));
    if (b.subnet.empty()) throw InvalidConfig("occupied snapshot bucket has an empty subnet bitmap");
  }
  return sketch;
}

void save_snapshot(const SegSketch& sketch, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << to_snapshot(sketch).dump(1) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

SegSketch load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidConfig(std::string("snapshot is not valid JSON: ") + e.what());
  }
  return from_snapshot(j);
}

}  // namespace segsketch
