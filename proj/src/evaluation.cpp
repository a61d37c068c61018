#include "segsketch/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_set>

#include "segsketch/errors.hpp"

namespace segsketch {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

double f1_score(double precision, double recall) noexcept {
  const double denom = precision + recall;
  return denom > 0 ? 2.0 * precision * recall / denom : 0.0;
}

EpochResult run_epoch(Detector& detector, const std::vector<PacketRecord>& trace) {
  EpochResult result;
  const auto start = Clock::now();
  for (const PacketRecord& r : trace) detector.update(r.src, r.dst);
  result.elapsed_seconds = seconds_since(start);
  result.report = detector.detect();
  return result;
}

MetricsSummary score(const std::vector<HostReport>& report, const GroundTruth& truth) {
  MetricsSummary m;
  std::unordered_set<Address> seen;
  double are_sum = 0.0;
  for (const HostReport& r : report) {
    if (!seen.insert(r.host).second) continue;
    const HostTruth* t = truth.find(r.host);
    if (t && is_super(t->role)) {
      ++m.tp;
      const auto c = static_cast<double>(t->subnet_cardinality);
      are_sum += std::fabs(c - r.estimate) / c;
    } else {
      ++m.fp;
    }
  }
  std::size_t positives = 0;
  for (const HostTruth& t : truth.hosts()) positives += is_super(t.role);
  m.fn = positives - m.tp;
  m.precision = m.tp + m.fp > 0 ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp) : 1.0;
  m.recall = positives > 0 ? static_cast<double>(m.tp) / static_cast<double>(positives) : 1.0;
  m.f1 = f1_score(m.precision, m.recall);
  m.are = m.tp > 0 ? are_sum / static_cast<double>(m.tp) : 0.0;
  return m;
}

double throughput_bench(Detector& detector, const std::vector<PacketRecord>& trace, int repetitions) {
  if (repetitions < 3) throw InvalidConfig("throughput bench needs at least 3 repetitions");
  std::vector<double> mpps;
  for (int i = 0; i < repetitions; ++i) {
    detector.reset();
    const auto start = Clock::now();
    for (const PacketRecord& r : trace) detector.update(r.src, r.dst);
    const double secs = seconds_since(start);
    mpps.push_back(secs > 0 ? static_cast<double>(trace.size()) / secs / 1e6 : 0.0);
  }
  std::sort(mpps.begin(), mpps.end());
  const std::size_t n = mpps.size();
  return n % 2 ? mpps[n / 2] : 0.5 * (mpps[n / 2 - 1] + mpps[n / 2]);
}

std::vector<SweepRow> sweep(const std::vector<SweepCell>& cells, const std::vector<PacketRecord>& trace,
                            const GroundTruth& truth, int throughput_repetitions) {
  std::vector<SweepRow> rows;
  rows.reserve(cells.size());
  for (const SweepCell& cell : cells) {
    auto detector = make_detector(cell.config);
    EpochResult epoch = run_epoch(*detector, trace);
    SweepRow row;
    row.detector = std::string(detector->name());
    row.axis = cell.axis;
    row.value = cell.value;
    row.budget_bytes = cell.config.sketch.memory_budget_bytes;
    row.allocated_bytes = detector->memory_bytes();
    row.reported = epoch.report.size();
    row.metrics = score(epoch.report, truth);
    if (throughput_repetitions >= 3) row.metrics.throughput_mpps = throughput_bench(*detector, trace, throughput_repetitions);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SweepCell> budget_cells(const std::vector<DetectorConfig>& bases, const std::vector<std::size_t>& budgets_kb) {
  std::vector<SweepCell> cells;
  for (const DetectorConfig& base : bases) {
    for (std::size_t kb : budgets_kb) {
      DetectorConfig cfg = base;
      cfg.sketch.memory_budget_bytes = kb * 1024;
      cells.push_back({"memory_kb", std::to_string(kb), cfg});
    }
  }
  return cells;
}

void write_results_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "detector,axis,value,budget_bytes,allocated_bytes,reported,tp,fp,fn,precision,recall,f1,are,throughput_mpps\n";
  const auto old_precision = out.precision(6);
  for (const SweepRow& r : rows) {
    const MetricsSummary& m = r.metrics;
    out << r.detector << ',' << r.axis << ',' << r.value << ',' << r.budget_bytes << ',' << r.allocated_bytes << ','
        << r.reported << ',' << m.tp << ',' << m.fp << ',' << m.fn << ',' << m.precision << ',' << m.recall << ','
        << m.f1 << ',' << m.are << ',' << m.throughput_mpps << '\n';
  }
  out.precision(old_precision);
}

nlohmann::json metrics_to_json(const MetricsSummary& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"are", m.are},
          {"throughput_mpps", m.throughput_mpps}, {"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn}};
}

nlohmann::json results_to_json(const std::vector<SweepRow>& rows, const nlohmann::json& config_echo) {
  nlohmann::json out;
  out["config"] = config_echo;
  out["conventions"] = {{"precision_when_no_reports", 1.0},
                        {"recall_when_no_positives", 1.0},
                        {"are_population", "reported true super hosts"}};
  out["rows"] = nlohmann::json::array();
  for (const SweepRow& r : rows) {
    out["rows"].push_back({{"detector", r.detector},
                           {"axis", r.axis},
                           {"value", r.value},
                           {"budget_bytes", r.budget_bytes},
                           {"allocated_bytes", r.allocated_bytes},
                           {"reported", r.reported},
                           {"metrics", metrics_to_json(r.metrics)}});
  }
  return out;
}

}  // namespace segsketch
