#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "segsketch/detector.hpp"
#include "segsketch/workload.hpp"

namespace segsketch {

// Conventions: precision is 1 when nothing is reported, recall is 1 when the
// truth holds no super host, F1 is 0 when both are 0. ARE averages
// |C - C_hat| / C over reported hosts that are true super hosts.
struct MetricsSummary {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  double are = 0.0;
  double throughput_mpps = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

double f1_score(double precision, double recall) noexcept;

struct EpochResult {
  std::vector<HostReport> report;
  double elapsed_seconds = 0.0;  // update loop only
};

// Feeds every record through update(), then calls detect().
EpochResult run_epoch(Detector& detector, const std::vector<PacketRecord>& trace);

MetricsSummary score(const std::vector<HostReport>& report, const GroundTruth& truth);

// Median over `repetitions` (>= 3) of records / update seconds, in millions.
// The detector is reset before each repetition.
double throughput_bench(Detector& detector, const std::vector<PacketRecord>& trace, int repetitions = 5);

struct SweepCell {
  std::string axis;
  std::string value;
  DetectorConfig config;
};

struct SweepRow {
  std::string detector;
  std::string axis;
  std::string value;
  std::size_t budget_bytes = 0;
  std::size_t allocated_bytes = 0;
  std::size_t reported = 0;
  MetricsSummary metrics;
};

// One fresh detector per cell. Throughput is measured when
// `throughput_repetitions` >= 3.
std::vector<SweepRow> sweep(const std::vector<SweepCell>& cells, const std::vector<PacketRecord>& trace,
                            const GroundTruth& truth, int throughput_repetitions = 0);

// Cells for every (kind, budget) pair on top of `base`.
std::vector<SweepCell> budget_cells(const std::vector<DetectorConfig>& bases, const std::vector<std::size_t>& budgets_kb);

// Columns: detector,axis,value,budget_bytes,allocated_bytes,reported,tp,fp,fn,
// precision,recall,f1,are,throughput_mpps
void write_results_csv(std::ostream& out, const std::vector<SweepRow>& rows);
nlohmann::json results_to_json(const std::vector<SweepRow>& rows, const nlohmann::json& config_echo);
nlohmann::json metrics_to_json(const MetricsSummary& m);

}  // namespace segsketch
