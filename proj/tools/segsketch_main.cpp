// segsketch command-line front end: generate, run, sweep, analyze, bench,
// inspect. Output is CSV or JSON; see README.md for column names.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "segsketch/analysis.hpp"
#include "segsketch/errors.hpp"
#include "segsketch/evaluation.hpp"
#include "segsketch/snapshot.hpp"
#include "segsketch/workload.hpp"

using namespace segsketch;

namespace {

const std::map<std::string, DetectorKind> kDetectors = {
    {"segsketch", DetectorKind::SegSketch},
    {"fulladdr", DetectorKind::FullAddress},
    {"spreadsketch", DetectorKind::SpreadSketch},
    {"hierlc", DetectorKind::HierLC},
};

const std::map<std::string, Direction> kDirections = {
    {"spreader", Direction::Spreader},
    {"receiver", Direction::Receiver},
};

struct SketchOptions {
  std::string detector = "segsketch";
  std::size_t memory_kb = 64;
  int r = 3;
  int G = 4;
  double theta = 0.5;
  std::uint32_t bitmap_bytes = 512;
  Direction direction = Direction::Spreader;
  std::uint64_t seed = 1;
  double cutoff = 500;
  bool clear_host_on_replace = false;
};

void add_sketch_options(CLI::App* app, SketchOptions& o, bool with_detector = true) {
  if (with_detector) {
    app->add_option("--detector", o.detector, "Detector")
        ->check(CLI::IsMember({"segsketch", "fulladdr", "spreadsketch", "hierlc"}))
        ->capture_default_str();
  }
  app->add_option("--memory-kb", o.memory_kb, "Memory budget in KB")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("-r,--rows", o.r, "Rows r")->check(CLI::Range(1, kMaxRows))->capture_default_str();
  app->add_option("-G,--segment-width", o.G, "Segment width G in bits")->check(CLI::IsMember({2, 4, 6, 8}))->capture_default_str();
  app->add_option("--theta", o.theta, "Threshold coefficient theta")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  app->add_option("--bitmap-bytes", o.bitmap_bytes, "Host bitmap size in bytes")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--direction", o.direction, "spreader or receiver")
      ->transform(CLI::CheckedTransformer(kDirections, CLI::ignore_case))
      ->capture_default_str();
  app->add_option("--seed", o.seed, "Hash and RNG seed")->capture_default_str();
  app->add_option("--cutoff", o.cutoff, "Flat cardinality cutoff for fulladdr and spreadsketch")->capture_default_str();
  app->add_flag("--clear-host-on-replace", o.clear_host_on_replace, "Also clear the host bitmap on replacement");
}

DetectorConfig to_detector_config(const SketchOptions& o) {
  DetectorConfig cfg;
  cfg.kind = kDetectors.at(o.detector);
  cfg.sketch.memory_budget_bytes = o.memory_kb * 1024;
  cfg.sketch.rows = o.r;
  cfg.sketch.host_bitmap_bits = o.bitmap_bytes * 8;
  cfg.sketch.segment = SegmentConfig::with_width(o.G);
  cfg.sketch.theta = o.theta;
  cfg.sketch.direction = o.direction;
  cfg.sketch.seed = o.seed;
  cfg.sketch.rng_seed = o.seed;
  cfg.sketch.clear_host_on_replace = o.clear_host_on_replace;
  cfg.cutoff = o.cutoff;
  return cfg;
}

nlohmann::json echo(const SketchOptions& o) {
  return {{"detector", o.detector}, {"memory_kb", o.memory_kb}, {"r", o.r},       {"G", o.G},
          {"theta", o.theta},       {"bitmap_bytes", o.bitmap_bytes}, {"direction", to_string(o.direction)},
          {"seed", o.seed},         {"cutoff", o.cutoff}, {"clear_host_on_replace", o.clear_host_on_replace}};
}

// Writes to `path`, or stdout when path is empty or "-".
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  fn(out);
  out.close();
  if (!out) throw IoError("write to '" + path + "' failed");
}

// --------------------------------------------------------------------------

struct GenerateOptions {
  GeneratorSpec spec;
  std::vector<int> prefixes = {16};
  std::size_t ratio = 0;
  std::string out;
  std::string truth;
};

// Sweep and bench take seed and direction from the sketch options.
void add_generator_options(CLI::App* app, GenerateOptions& g, bool own_seed = true) {
  auto& s = g.spec;
  app->add_option("--attackers", s.attacker_count, "Planted super hosts")->capture_default_str();
  app->add_option("--benign", s.benign_count, "Benign hosts")->capture_default_str();
  app->add_option("--benign-peers-min", s.benign_peers_min, "Fewest peers per benign host")->capture_default_str();
  app->add_option("--benign-peers-max", s.benign_peers_max, "Most peers per benign host")->capture_default_str();
  app->add_option("--diverse", s.diverse_count, "Benign hosts with network-wide peers")->capture_default_str();
  app->add_option("--diverse-peers", s.diverse_peers, "Peers per diverse host")->capture_default_str();
  app->add_option("--attacker-prefix", g.prefixes, "Attacker subnet prefix lengths, cycled")
      ->check(CLI::Range(1, 31))
      ->capture_default_str();
  app->add_option("--attacker-card-min", s.attacker_cardinality_min, "Fewest peers per attacker")->capture_default_str();
  app->add_option("--attacker-card-max", s.attacker_cardinality_max, "Most peers per attacker")->capture_default_str();
  app->add_option("--ratio", g.ratio, "Benign hosts per attacker; sets --benign when given");
  app->add_option("--dup", s.duplication, "Packets per distinct pair")->capture_default_str();
  if (!own_seed) return;
  app->add_option("--direction", s.direction, "spreader or receiver")
      ->transform(CLI::CheckedTransformer(kDirections, CLI::ignore_case))
      ->capture_default_str();
  app->add_option("--seed", s.seed, "Generator seed")->capture_default_str();
}

GeneratorSpec finish_spec(const GenerateOptions& g, bool benign_given) {
  GeneratorSpec spec = g.spec;
  spec.attacker_prefix_lengths = g.prefixes;
  if (g.ratio > 0) {
    spec.super_ratio = g.ratio;
    if (!benign_given) spec.benign_count = spec.attacker_count * g.ratio;
  }
  return spec;
}

int cmd_generate(const GenerateOptions& g, bool benign_given) {
  const Workload w = generate(finish_spec(g, benign_given));
  write_trace(g.out, w.trace, g.truth, w.truth);
  std::cout << "records=" << w.trace.size() << " hosts=" << w.truth.size()
            << " super=" << (w.truth.count(Role::Spreader) + w.truth.count(Role::Receiver))
            << " benign=" << w.truth.count(Role::Benign) << " diverse=" << w.truth.count(Role::BenignDiverse) << '\n';
  return 0;
}

// --------------------------------------------------------------------------

struct RunOptions {
  SketchOptions sketch;
  std::string trace;
  std::string truth;
  std::string out;
  std::string report;
  std::string snapshot;
  int bench = 0;
};

int cmd_run(const RunOptions& o) {
  const auto trace = read_trace(o.trace);
  auto detector = make_detector(to_detector_config(o.sketch));
  const EpochResult epoch = run_epoch(*detector, trace);
  if (!o.snapshot.empty()) {
    const auto* seg = dynamic_cast<const SegSketchDetector*>(detector.get());
    if (!seg) throw InvalidConfig("--snapshot needs --detector segsketch");
    save_snapshot(seg->sketch(), o.snapshot);
  }

  nlohmann::json out;
  out["config"] = echo(o.sketch);
  out["records"] = trace.size();
  out["allocated_bytes"] = detector->memory_bytes();
  out["reported"] = epoch.report.size();
  out["elapsed_seconds"] = epoch.elapsed_seconds;
  if (!o.truth.empty()) {
    MetricsSummary m = score(epoch.report, read_truth(o.truth));
    if (o.bench >= 3) m.throughput_mpps = throughput_bench(*detector, trace, o.bench);
    out["metrics"] = metrics_to_json(m);
  } else if (o.bench >= 3) {
    out["throughput_mpps"] = throughput_bench(*detector, trace, o.bench);
  }
  if (!o.report.empty()) {
    with_output(o.report, [&](std::ostream& os) {
      os << "host,prefix_bits,estimate,threshold\n" << std::setprecision(10);
      for (const HostReport& r : epoch.report) {
        os << format_address(r.host) << ',' << r.prefix_bits << ',' << r.estimate << ',' << r.threshold << '\n';
      }
    });
  }
  with_output(o.out, [&](std::ostream& os) { os << out.dump(2) << '\n'; });
  return 0;
}

// --------------------------------------------------------------------------

struct SweepOptions {
  SketchOptions sketch;
  GenerateOptions gen;
  std::string axis;
  std::vector<std::string> detectors = {"segsketch"};
  std::string trace;
  std::string truth;
  std::string out;
  std::string json;
  int bench = 0;
};

int cmd_sweep(SweepOptions o) {
  o.gen.spec.seed = o.sketch.seed;
  o.gen.spec.direction = o.sketch.direction;
  std::vector<SweepRow> rows;
  auto bases = [&](const SketchOptions& s) {
    std::vector<DetectorConfig> out;
    for (const std::string& d : o.detectors) {
      SketchOptions copy = s;
      copy.detector = d;
      out.push_back(to_detector_config(copy));
    }
    return out;
  };

  if (o.axis == "ratio") {
    for (std::size_t ratio : {20, 25, 33, 50}) {
      GenerateOptions g = o.gen;
      g.ratio = ratio;
      const Workload w = generate(finish_spec(g, false));
      std::vector<SweepCell> cells;
      for (const DetectorConfig& cfg : bases(o.sketch)) cells.push_back({"ratio", "1:" + std::to_string(ratio), cfg});
      for (SweepRow& r : sweep(cells, w.trace, w.truth, o.bench)) rows.push_back(std::move(r));
    }
  } else {
    if (o.trace.empty() || o.truth.empty()) throw InvalidConfig("--trace and --truth are required for this axis");
    const auto trace = read_trace(o.trace);
    const GroundTruth truth = read_truth(o.truth);
    std::vector<SweepCell> cells;
    if (o.axis == "memory") {
      cells = budget_cells(bases(o.sketch), {32, 64, 128, 256, 512});
    } else {
      for (const std::string& d : o.detectors) {
        auto add = [&](SketchOptions s, const std::string& value) {
          s.detector = d;
          cells.push_back({o.axis, value, to_detector_config(s)});
        };
        if (o.axis == "theta") {
          for (double t : {0.35, 0.5, 0.65}) {
            SketchOptions s = o.sketch;
            s.theta = t;
            std::ostringstream label;
            label << t;
            add(s, label.str());
          }
        } else if (o.axis == "G") {
          for (int g : {2, 4, 6, 8}) {
            SketchOptions s = o.sketch;
            s.G = g;
            add(s, std::to_string(g));
          }
        } else if (o.axis == "bitmap") {
          for (std::uint32_t bytes : {204u, 256u, 512u, 768u, 1024u}) {
            SketchOptions s = o.sketch;
            s.bitmap_bytes = bytes;
            add(s, std::to_string(bytes));
          }
        }
      }
    }
    rows = sweep(cells, trace, truth, o.bench);
  }

  with_output(o.out, [&](std::ostream& os) { write_results_csv(os, rows); });
  if (!o.json.empty()) {
    nlohmann::json cfg = echo(o.sketch);
    cfg["axis"] = o.axis;
    cfg["detectors"] = o.detectors;
    with_output(o.json, [&](std::ostream& os) { os << results_to_json(rows, cfg).dump(2) << '\n'; });
  }
  return 0;
}

// --------------------------------------------------------------------------

struct AnalyzeOptions {
  std::vector<double> N = {1e4};
  std::vector<double> C = {1e3};
  std::vector<int> l = {16};
  std::vector<int> G = {2, 4, 6, 8};
  std::uint32_t bitmap_bits = 4096;
  int trials = 500;
  bool level_salt = false;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_analyze(const AnalyzeOptions& o) {
  with_output(o.out, [&](std::ostream& os) {
    os << "strategy,N,C,l,G,epsilon,M,U,bound_raw,bound,gap_exact,gap_taylor,simulated_are,status\n";
    os << std::setprecision(10);
    for (double N : o.N)
      for (double C : o.C)
        for (int l : o.l)
          for (int G : o.G)
            for (auto s : {analysis::Strategy::Full, analysis::Strategy::Host}) {
              const analysis::BoundInputs in{N, C, l, G};
              os << analysis::to_string(s) << ',' << N << ',' << C << ',' << l << ',' << G << ',';
              try {
                in.validate();
              } catch (const InvalidConfig& e) {
                os << ",,,,,,,,invalid-input\n";
                continue;
              }
              const auto v = analysis::table1_variables(s, in);
              os << v.epsilon << ',' << v.M << ',' << v.U << ',';
              std::string status = "ok";
              try {
                const auto b = analysis::theorem1_bound(s, in);
                os << b.raw << ',' << b.clamped << ',';
              } catch (const NonPositiveEpsilon&) {
                os << ",,";
                status = "nonpositive-epsilon";
              }
              if (in.depth_r() >= 1) {
                const auto gap = analysis::theorem2_gap(in);
                os << gap.exact << ',' << gap.taylor << ',';
              } else {
                os << ",,";
              }
              if (o.trials > 0) {
                os << analysis::simulate_are(s, in, {o.bitmap_bits, o.trials, o.seed, o.level_salt});
              }
              os << ',' << status << '\n';
            }
  });
  return 0;
}

// --------------------------------------------------------------------------

struct BenchOptions {
  SketchOptions sketch;
  GenerateOptions gen;
  std::vector<std::string> detectors = {"segsketch", "fulladdr", "spreadsketch", "hierlc"};
  std::string trace;
  int reps = 5;
  std::string out;
};

int cmd_bench(const BenchOptions& o) {
  std::vector<PacketRecord> trace;
  if (!o.trace.empty()) {
    trace = read_trace(o.trace);
  } else {
    GenerateOptions g = o.gen;
    g.spec.seed = o.sketch.seed;
    g.spec.direction = o.sketch.direction;
    trace = generate(finish_spec(g, false)).trace;
  }
  with_output(o.out, [&](std::ostream& os) {
    os << "detector,memory_kb,records,allocated_bytes,mpps\n";
    for (const std::string& d : o.detectors) {
      SketchOptions s = o.sketch;
      s.detector = d;
      auto detector = make_detector(to_detector_config(s));
      const double mpps = throughput_bench(*detector, trace, o.reps);
      os << d << ',' << s.memory_kb << ',' << trace.size() << ',' << detector->memory_bytes() << ',' << mpps << '\n';
    }
  });
  return 0;
}

// --------------------------------------------------------------------------

int cmd_inspect(const std::string& path, bool list_buckets) {
  const SegSketch sketch = load_snapshot(path);
  const SketchConfig& cfg = sketch.config();
  std::size_t occupied = 0;
  for (int row = 0; row < cfg.rows; ++row)
    for (std::uint32_t col = 0; col < sketch.columns(); ++col) occupied += sketch.bucket(row, col).occupied;
  std::cout << "rows=" << cfg.rows << " columns=" << sketch.columns() << " bucket_bytes=" << cfg.bucket_bytes()
            << " allocated_bytes=" << sketch.allocated_bytes() << " occupied=" << occupied << '\n';
  std::cout << "G=" << cfg.segment.width << " D=" << cfg.segment.depth << " theta=" << cfg.theta
            << " direction=" << to_string(cfg.direction) << '\n';
  if (list_buckets) {
    std::cout << "row,col,host,inferred_prefix,estimate\n";
    for (int row = 0; row < cfg.rows; ++row) {
      for (std::uint32_t col = 0; col < sketch.columns(); ++col) {
        const Bucket& b = sketch.bucket(row, col);
        if (!b.occupied) continue;
        const auto q = sketch.query(b.host);
        std::cout << row << ',' << col << ',' << format_address(b.host) << ',' << (q ? q->inferred_prefix : -1) << ','
                  << (q ? q->estimate : 0.0) << '\n';
      }
    }
  }
  std::cout << "host,inferred_prefix,estimate,threshold\n";
  for (const DetectionEntry& e : sketch.detect()) {
    std::cout << format_address(e.host) << ',' << e.inferred_prefix << ',' << e.estimate << ',' << e.threshold << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Super host detection with subnet-aware sketches"};
  app.set_config("--config", "", "TOML/INI file with option defaults; flags override");
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic trace and its truth sidecar");
  add_generator_options(generate_cmd, gen);
  generate_cmd->add_option("-o,--out", gen.out, "Trace CSV path")->required();
  generate_cmd->add_option("--truth", gen.truth, "Truth sidecar CSV path")->required();

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run one detector over a trace and score it");
  add_sketch_options(run_cmd, run.sketch);
  run_cmd->add_option("--trace", run.trace, "Trace CSV")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--truth", run.truth, "Truth sidecar; enables metrics")->check(CLI::ExistingFile);
  run_cmd->add_option("-o,--out", run.out, "Metrics JSON path (default stdout)");
  run_cmd->add_option("--report", run.report, "Reported hosts CSV path");
  run_cmd->add_option("--snapshot", run.snapshot, "Save the SegSketch state as JSON");
  run_cmd->add_option("--bench", run.bench, "Throughput repetitions (>= 3 to enable)");

  SweepOptions sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one parameter axis");
  add_sketch_options(sweep_cmd, sw.sketch, false);
  add_generator_options(sweep_cmd->add_option_group("generator", "Workload for --axis ratio"), sw.gen, false);
  sweep_cmd->add_option("--axis", sw.axis, "memory, theta, G, bitmap or ratio")
      ->required()
      ->check(CLI::IsMember({"memory", "theta", "G", "bitmap", "ratio"}));
  sweep_cmd->add_option("--detectors", sw.detectors, "Detectors to sweep")
      ->check(CLI::IsMember({"segsketch", "fulladdr", "spreadsketch", "hierlc"}))
      ->capture_default_str();
  sweep_cmd->add_option("--trace", sw.trace, "Trace CSV")->check(CLI::ExistingFile);
  sweep_cmd->add_option("--truth", sw.truth, "Truth sidecar")->check(CLI::ExistingFile);
  sweep_cmd->add_option("-o,--out", sw.out, "Results CSV path (default stdout)");
  sweep_cmd->add_option("--json", sw.json, "Results JSON path");
  sweep_cmd->add_option("--bench", sw.bench, "Throughput repetitions per cell (>= 3 to enable)");

  AnalyzeOptions an;
  auto* analyze_cmd = app.add_subcommand("analyze", "Evaluate error bounds and simulated ARE");
  analyze_cmd->add_option("--N", an.N, "Flow cardinalities")->capture_default_str();
  analyze_cmd->add_option("--C", an.C, "Subnet cardinalities")->capture_default_str();
  analyze_cmd->add_option("--l", an.l, "True prefix lengths")->capture_default_str();
  analyze_cmd->add_option("--G", an.G, "Segment widths")->check(CLI::IsMember({2, 4, 6, 8}))->capture_default_str();
  analyze_cmd->add_option("--bitmap-bits", an.bitmap_bits, "Bitmap size for simulation")->capture_default_str();
  analyze_cmd->add_option("--trials", an.trials, "Simulation trials (0 skips)")->capture_default_str();
  analyze_cmd->add_flag("--level-salt", an.level_salt, "Salt segment hashes with the level in simulation");
  analyze_cmd->add_option("--seed", an.seed, "Simulation seed")->capture_default_str();
  analyze_cmd->add_option("-o,--out", an.out, "CSV path (default stdout)");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Update throughput per detector");
  add_sketch_options(bench_cmd, bench.sketch, false);
  add_generator_options(bench_cmd->add_option_group("generator", "Workload when --trace is absent"), bench.gen, false);
  bench_cmd->add_option("--detectors", bench.detectors, "Detectors to bench")
      ->check(CLI::IsMember({"segsketch", "fulladdr", "spreadsketch", "hierlc"}))
      ->capture_default_str();
  bench_cmd->add_option("--trace", bench.trace, "Trace CSV")->check(CLI::ExistingFile);
  bench_cmd->add_option("--reps", bench.reps, "Repetitions (median taken)")->check(CLI::Range(3, 1000))->capture_default_str();
  bench_cmd->add_option("-o,--out", bench.out, "CSV path (default stdout)");

  std::string snapshot_path;
  bool list_buckets = false;
  auto* inspect_cmd = app.add_subcommand("inspect", "Summarize a saved SegSketch snapshot");
  inspect_cmd->add_option("snapshot", snapshot_path, "Snapshot JSON")->required()->check(CLI::ExistingFile);
  inspect_cmd->add_flag("--buckets", list_buckets, "List occupied buckets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate_cmd) return cmd_generate(gen, generate_cmd->count("--benign") > 0);
    if (*run_cmd) return cmd_run(run);
    if (*sweep_cmd) return cmd_sweep(sw);
    if (*analyze_cmd) return cmd_analyze(an);
    if (*bench_cmd) return cmd_bench(bench);
    if (*inspect_cmd) return cmd_inspect(snapshot_path, list_buckets);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
