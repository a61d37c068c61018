#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "segsketch/errors.hpp"
#include "segsketch/evaluation.hpp"

using namespace segsketch;

namespace {

GroundTruth truth_with(std::size_t positives, std::size_t negatives) {
  GroundTruth t;
  for (std::size_t i = 0; i < positives; ++i) t.add({static_cast<Address>(i + 1), Role::Spreader, 16, 1000, 1000});
  for (std::size_t i = 0; i < negatives; ++i) t.add({static_cast<Address>(i + 10000), Role::Benign, 0, 10, 10});
  return t;
}

HostReport rep(Address host, double estimate = 1000) { return {host, estimate, 16, 500}; }

// Fixed report, counts updates.
class StubDetector final : public Detector {
 public:
  std::string_view name() const noexcept override { return "stub"; }
  void update(Address, Address) override { ++updates; }
  std::vector<HostReport> detect() const override { return {rep(1)}; }
  void reset() override { updates = 0; }
  std::size_t memory_bytes() const noexcept override { return 0; }
  std::size_t updates = 0;
};

}  // namespace

TEST(F1, Formula) {
  EXPECT_NEAR(f1_score(0.9, 0.75), 0.8181818, 1e-6);
  EXPECT_EQ(f1_score(0, 0), 0.0);
  EXPECT_EQ(f1_score(1, 1), 1.0);
}

TEST(Score, WorkedExample) {
  // TP=9, FP=1, FN=3.
  const GroundTruth t = truth_with(12, 5);
  std::vector<HostReport> report;
  for (Address h = 1; h <= 9; ++h) report.push_back(rep(h));
  report.push_back(rep(10000));
  const MetricsSummary m = score(report, t);
  EXPECT_EQ(m.tp, 9u);
  EXPECT_EQ(m.fp, 1u);
  EXPECT_EQ(m.fn, 3u);
  EXPECT_DOUBLE_EQ(m.precision, 0.9);
  EXPECT_DOUBLE_EQ(m.recall, 0.75);
  EXPECT_NEAR(m.f1, 0.8182, 1e-4);
}

TEST(Score, SingleTruePositiveAre) {
  const MetricsSummary m = score({rep(1, 1100)}, truth_with(1, 0));
  EXPECT_NEAR(m.are, 0.1, 1e-12);
  EXPECT_EQ(m.f1, 1.0);
}

TEST(Score, EdgeConventions) {
  const MetricsSummary none = score({}, truth_with(3, 3));
  EXPECT_EQ(none.precision, 1.0);
  EXPECT_EQ(none.recall, 0.0);
  EXPECT_EQ(none.are, 0.0);
  const MetricsSummary no_pos = score({rep(10000)}, truth_with(0, 3));
  EXPECT_EQ(no_pos.recall, 1.0);
  EXPECT_EQ(no_pos.precision, 0.0);
  const MetricsSummary both = score({rep(10000)}, truth_with(2, 3));
  EXPECT_EQ(both.f1, 0.0);
}

TEST(Score, UnlabeledHostsAreFalsePositivesAndDuplicatesCountOnce) {
  const MetricsSummary m = score({rep(1), rep(1), rep(424242)}, truth_with(1, 0));
  EXPECT_EQ(m.tp, 1u);
  EXPECT_EQ(m.fp, 1u);
}

TEST(Score, AreIgnoresOrderAndFalsePositives) {
  std::vector<HostReport> report = {rep(1, 900), rep(2, 1300), rep(10000, 5), rep(3, 1000)};
  const GroundTruth t = truth_with(4, 2);
  const MetricsSummary a = score(report, t);
  std::reverse(report.begin(), report.end());
  const MetricsSummary b = score(report, t);
  EXPECT_DOUBLE_EQ(a.are, b.are);
  EXPECT_NEAR(a.are, (0.1 + 0.3 + 0.0) / 3.0, 1e-12);
}

TEST(RunEpoch, EmptyTraceEmptyReport) {
  DetectorConfig cfg;
  auto d = make_detector(cfg);
  const EpochResult r = run_epoch(*d, {});
  EXPECT_TRUE(r.report.empty());
}

TEST(RunEpoch, DeterministicAndTimed) {
  GeneratorSpec spec;
  spec.benign_count = 200;
  spec.attacker_count = 5;
  spec.attacker_prefix_lengths = {24};
  spec.attacker_cardinality_min = spec.attacker_cardinality_max = 200;
  const Workload w = generate(spec);
  DetectorConfig cfg;
  auto a = make_detector(cfg);
  auto b = make_detector(cfg);
  const EpochResult ra = run_epoch(*a, w.trace);
  const EpochResult rb = run_epoch(*b, w.trace);
  EXPECT_GT(ra.elapsed_seconds, 0.0);
  ASSERT_EQ(ra.report.size(), rb.report.size());
  for (std::size_t i = 0; i < ra.report.size(); ++i) {
    EXPECT_EQ(ra.report[i].host, rb.report[i].host);
    EXPECT_EQ(ra.report[i].estimate, rb.report[i].estimate);
  }
}

TEST(Throughput, NeedsThreeRepetitions) {
  StubDetector d;
  std::vector<PacketRecord> trace(1000, PacketRecord{1, 2});
  EXPECT_THROW(throughput_bench(d, trace, 2), InvalidConfig);
  EXPECT_GT(throughput_bench(d, trace, 3), 0.0);
  EXPECT_EQ(d.updates, 1000u);  // reset before each repetition
}

TEST(Sweep, RowsPerBudgetAndDeterministic) {
  GeneratorSpec spec;
  spec.benign_count = 300;
  spec.attacker_count = 10;
  spec.attacker_prefix_lengths = {24};
  spec.attacker_cardinality_min = spec.attacker_cardinality_max = 200;
  const Workload w = generate(spec);
  DetectorConfig seg;
  DetectorConfig full;
  full.kind = DetectorKind::FullAddress;
  full.cutoff = 100;
  const auto cells = budget_cells({seg, full}, {32, 64, 128, 256, 512});
  ASSERT_EQ(cells.size(), 10u);
  const auto rows = sweep(cells, w.trace, w.truth);
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.detector == "segsketch"; }), 5);
  for (const SweepRow& r : rows) EXPECT_LE(r.allocated_bytes, r.budget_bytes);

  std::ostringstream a, b;
  write_results_csv(a, rows);
  write_results_csv(b, sweep(cells, w.trace, w.truth));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')),
            "detector,axis,value,budget_bytes,allocated_bytes,reported,tp,fp,fn,precision,recall,f1,are,throughput_mpps");

  const auto j = results_to_json(rows, {{"seed", 1}});
  EXPECT_EQ(j["rows"].size(), 10u);
  EXPECT_EQ(j["config"]["seed"], 1);
  EXPECT_EQ(j["conventions"]["recall_when_no_positives"], 1.0);
}
