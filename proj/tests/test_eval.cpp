#include <gtest/gtest.h>

#include <deque>
#include <sstream>

#include "driftlab/eval.hpp"
#include "driftlab/generators.hpp"
#include "driftlab/serialization.hpp"

using namespace driftlab;

namespace {

StreamSource make_source(std::string name, std::size_t n, std::uint64_t seed) {
  DriftProfile p;
  p.change_points = {n / 2};
  auto g = gen_drift_stream(p, ConceptFamily::GaussianClusters, n, seed);
  return {std::move(name), std::make_shared<const StreamSchema>(g.schema),
          std::make_shared<const std::vector<Instance>>(std::move(g.instances))};
}

CellResult cell(const StrategyRow& row, double budget, double accuracy) {
  CellResult c;
  c.stream = "s";
  c.row = row;
  c.budget = budget;
  c.accuracy = accuracy;
  c.seed_accuracies = {accuracy};
  return c;
}

ExperimentGrid small_grid() {
  ExperimentGrid grid;
  grid.streams = {make_source("drift", 1500, 4)};
  grid.learners = {LearnerKind::NaiveBayes};
  grid.strategies = {{ActiveKind::Random, SelfLabelKind::None},
                     {ActiveKind::RandVar, SelfLabelKind::None},
                     {ActiveKind::RandVar, SelfLabelKind::WinErr}};
  grid.budgets = {0.05, 0.1, 0.2};
  grid.seeds = {1, 2, 3, 4};
  return grid;
}

std::string jsonl(const ComparisonReport& rep) {
  std::ostringstream out;
  write_report_jsonl(out, rep, json::object());
  return out.str();
}

}  // namespace

TEST(Prequential, WindowArithmetic) {
  PrequentialWindow w(4);
  EXPECT_EQ(w.value(), 0.0);
  for (bool loss : {false, true, false, true}) w.update(loss);
  EXPECT_DOUBLE_EQ(w.value(), 0.5);
  EXPECT_DOUBLE_EQ(w.accuracy(), 0.5);
  for (int i = 0; i < 4; ++i) w.update(false);
  EXPECT_EQ(w.value(), 0.0);
  EXPECT_EQ(w.accuracy(), 1.0);
  EXPECT_THROW(PrequentialWindow(0), ConfigError);
}

TEST(Prequential, MatchesTrailingWindowOracle) {
  Rng rng(10);
  for (std::size_t omega : {1u, 7u, 1000u}) {
    PrequentialWindow w(omega);
    std::deque<int> tail;
    for (int t = 0; t < 5000; ++t) {
      const bool loss = rng.bernoulli(t < 2500 ? 0.1 : 0.45);
      w.update(loss);
      tail.push_back(loss ? 1 : 0);
      if (tail.size() > omega) tail.pop_front();
      double sum = 0.0;
      for (int v : tail) sum += v;
      ASSERT_NEAR(w.value(), sum / tail.size(), 1e-12);
      ASSERT_EQ(w.size(), tail.size());
    }
  }
}

TEST(Report, LabelsAndTableRows) {
  auto rows = table_rows({ActiveKind::Random, ActiveKind::Sampling, ActiveKind::RandVar}, std::vector<SelfLabelKind>(
                                                                                            std::begin(kAllSelfLabelKinds), std::end(kAllSelfLabelKinds)));
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[0].label(), "ALR");
  EXPECT_EQ(rows[1].label(), "ALS");
  EXPECT_EQ(rows[2].label(), "ALRV");
  EXPECT_EQ(rows[3].label(), "Fixed");
  EXPECT_EQ(rows.back().label(), "WinErr");
  EXPECT_EQ((StrategyRow{ActiveKind::Random, SelfLabelKind::Cddm}).label(), "cDDM+ALR");
}

TEST(Report, StrategyEqualToBaselineNeverImproves) {
  const StrategyRow alrv{ActiveKind::RandVar, SelfLabelKind::None}, fixed{ActiveKind::RandVar, SelfLabelKind::Fixed};
  auto rep = make_report({"s"}, {LearnerKind::NaiveBayes}, {alrv, fixed}, {0.1}, {cell(alrv, 0.1, 0.8), cell(fixed, 0.1, 0.8)});
  EXPECT_EQ(rep.fh, 0.0);
  EXPECT_FALSE(rep.cell(0, 0, 1, 0).improves);
  EXPECT_TRUE(rep.cell(0, 0, 0, 0).column_best);
  EXPECT_TRUE(rep.cell(0, 0, 1, 0).column_best);
}

TEST(Report, DuplicateAndOracleGiveHalf) {
  const StrategyRow alr{ActiveKind::Random, SelfLabelKind::None}, alrv{ActiveKind::RandVar, SelfLabelKind::None};
  const StrategyRow dup{ActiveKind::RandVar, SelfLabelKind::Uni}, oracle{ActiveKind::RandVar, SelfLabelKind::Fixed};
  auto rep = make_report({"s"}, {LearnerKind::NaiveBayes}, {alr, alrv, dup, oracle}, {0.05},
                         {cell(alr, 0.05, 0.7), cell(alrv, 0.05, 0.75), cell(dup, 0.05, 0.75), cell(oracle, 0.05, 1.0)});
  EXPECT_DOUBLE_EQ(rep.fh, 0.5);
  EXPECT_DOUBLE_EQ(rep.acc, (0.75 + 1.0) / 2.0);
  EXPECT_DOUBLE_EQ(rep.cell(0, 0, 3, 0).baseline, 0.75);
  EXPECT_TRUE(rep.cell(0, 0, 3, 0).improves);
  EXPECT_TRUE(rep.cell(0, 0, 3, 0).column_best);
  EXPECT_FALSE(rep.cell(0, 0, 1, 0).column_best);
  ASSERT_EQ(rep.by_strategy.size(), 2u);
  EXPECT_EQ(rep.by_strategy[1].strategy, "Fixed");
  EXPECT_DOUBLE_EQ(rep.by_strategy[1].fh, 1.0);
  EXPECT_THROW(make_report({"s"}, {LearnerKind::NaiveBayes}, {alr}, {0.05, 0.1}, {cell(alr, 0.05, 0.7)}), ConfigError);
}

TEST(Grid, RunsEveryCellAndAveragesSeeds) {
  auto grid = small_grid();
  EXPECT_EQ(grid.run_count(), 36u);
  auto rep = run_grid(grid);
  EXPECT_EQ(rep.runs_executed, 36u);
  EXPECT_EQ(rep.cells.size(), 9u);
  EXPECT_EQ(rep.failed_cells, 0u);
  for (const auto& c : rep.cells) {
    ASSERT_EQ(c.seed_accuracies.size(), 4u);
    double m = 0.0;
    for (double a : c.seed_accuracies) m += a;
    EXPECT_NEAR(c.accuracy, m / 4.0, 1e-12);
    EXPECT_LE(c.mean_spend, c.budget + 1.0 / 1500.0);
  }
  // A cell equals a direct run with the same configuration.
  const auto cfg = grid.run_config(0, 2, 1, 3);
  const auto direct = run_stream(*grid.streams[0].instances, grid.streams[0].schema, cfg, {}, false);
  EXPECT_EQ(rep.cell(0, 0, 2, 1).seed_accuracies[3], direct.summary.global_accuracy);
}

TEST(Grid, DeterministicAndIndependentOfThreadCount) {
  auto grid = small_grid();
  const auto a = jsonl(run_grid(grid));
  grid.jobs = 3;
  const auto b = jsonl(run_grid(grid));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, jsonl(run_grid(small_grid())));
}

TEST(Grid, FailedCellIsRecordedNotFatal) {
  auto grid = small_grid();
  grid.seeds = {1};
  auto broken = grid.streams[0];
  auto rows = *broken.instances;
  rows[10].label.reset();
  broken.name = "broken";
  broken.instances = std::make_shared<const std::vector<Instance>>(std::move(rows));
  grid.streams.push_back(broken);
  auto rep = run_grid(grid);
  EXPECT_EQ(rep.failed_cells, 9u);
  EXPECT_FALSE(rep.cell(0, 0, 0, 0).error.has_value());
  ASSERT_TRUE(rep.cell(1, 0, 0, 0).error.has_value());
  std::ostringstream text;
  write_report_text(text, rep);
  EXPECT_NE(text.str().find("failed"), std::string::npos);
}

TEST(Grid, TextTableShape) {
  auto grid = small_grid();
  grid.seeds = {1};
  auto rep = run_grid(grid);
  std::ostringstream text;
  write_report_text(text, rep);
  const auto s = text.str();
  EXPECT_NE(s.find("drift / nb"), std::string::npos);
  EXPECT_NE(s.find("B=5%"), std::string::npos);
  EXPECT_NE(s.find("B=20%"), std::string::npos);
  EXPECT_NE(s.find("WinErr"), std::string::npos);
  EXPECT_NE(s.find('*'), std::string::npos);
  EXPECT_NE(s.find("Fh="), std::string::npos);

  std::istringstream lines(jsonl(rep));
  std::string line;
  std::size_t n = 0, cells = 0;
  while (std::getline(lines, line)) {
    const auto j = json::parse(line);
    ++n;
    if (j["record"] == "cell") ++cells;
  }
  EXPECT_EQ(cells, 9u);
  EXPECT_EQ(n, 1u + 9u + 3u + 1u + 1u);
}
