#pragma once

// Experiment grids: streams x learners x strategy rows x budgets x seeds. Each
// (stream, learner, row, budget) cell averages global accuracy over its seeds;
// cells then get compared against the best pure active-learning row of the
// same stream, learner and budget.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "driftlab/hybrid.hpp"

namespace driftlab {

struct StreamSource {
  std::string name;
  std::shared_ptr<const StreamSchema> schema;
  std::shared_ptr<const std::vector<Instance>> instances;
};

/// One strategy row of a comparison table.
struct StrategyRow {
  ActiveKind active = ActiveKind::RandVar;
  SelfLabelKind self_label = SelfLabelKind::None;

  bool pure_active() const { return self_label == SelfLabelKind::None; }

  /// ALR / ALS / ALRV for pure rows; the self-labeling name for hybrids on
  /// RandVar, suffixed with the query strategy otherwise.
  std::string label() const {
    std::string al = active == ActiveKind::Random ? "ALR" : active == ActiveKind::Sampling ? "ALS" : "ALRV";
    if (pure_active()) return al;
    static const std::map<SelfLabelKind, std::string> names = {
        {SelfLabelKind::Fixed, "Fixed"}, {SelfLabelKind::Uni, "Uni"},     {SelfLabelKind::RandUni, "RandUni"},
        {SelfLabelKind::InvUnc, "InvUnc"}, {SelfLabelKind::Cddm, "cDDM"}, {SelfLabelKind::Ceddm, "cEDDM"},
        {SelfLabelKind::WinErr, "WinErr"}};
    std::string s = names.at(self_label);
    if (active != ActiveKind::RandVar) s += "+" + al;
    return s;
  }

  friend bool operator==(const StrategyRow&, const StrategyRow&) = default;
};

/// The table layout: one row per query strategy, then one hybrid row per
/// self-labeling strategy on top of `base`.
inline std::vector<StrategyRow> table_rows(const std::vector<ActiveKind>& active, const std::vector<SelfLabelKind>& self_label,
                                           ActiveKind base = ActiveKind::RandVar) {
  std::vector<StrategyRow> rows;
  for (auto a : active) rows.push_back({a, SelfLabelKind::None});
  for (auto s : self_label) {
    if (s != SelfLabelKind::None) rows.push_back({base, s});
  }
  return rows;
}

inline const std::vector<double>& default_budgets() {
  static const std::vector<double> budgets = {0.01, 0.05, 0.10, 0.20, 0.50};
  return budgets;
}

struct ExperimentGrid {
  std::vector<StreamSource> streams;
  std::vector<LearnerKind> learners;
  std::vector<StrategyRow> strategies;
  std::vector<double> budgets = default_budgets();
  std::vector<std::uint64_t> seeds = {1};
  /// Settings shared by every run; learner kind, strategies, budget and seed
  /// are overwritten per run.
  HybridConfig base;
  std::size_t jobs = 1;

  std::size_t cell_count() const { return streams.size() * learners.size() * strategies.size() * budgets.size(); }
  std::size_t run_count() const { return cell_count() * seeds.size(); }

  HybridConfig run_config(std::size_t learner, std::size_t row, std::size_t budget, std::size_t seed) const {
    HybridConfig cfg = base;
    cfg.learner.kind = learners[learner];
    cfg.active = strategies[row].active;
    cfg.self_label = strategies[row].self_label;
    cfg.budget = budgets[budget];
    cfg.seed = seeds[seed];
    return cfg;
  }
};

struct CellResult {
  std::string stream;
  LearnerKind learner = LearnerKind::NaiveBayes;
  StrategyRow row;
  double budget = 0.0;
  std::vector<double> seed_accuracies;
  double accuracy = 0.0;       // mean over successful seeds
  double mean_spend = 0.0;
  std::optional<std::string> error;
  // Filled by make_report.
  double baseline = 0.0;       // best pure-AL accuracy in the same column
  bool improves = false;       // strictly beats the baseline
  bool column_best = false;    // maximum of its column
};

struct AggregateMeasure {
  LearnerKind learner = LearnerKind::NaiveBayes;
  double budget = 0.0;      // NaN for per-strategy aggregates
  std::string strategy;     // empty for per-budget aggregates
  double acc = 0.0;         // mean accuracy of the hybrid cells
  double fh = 0.0;          // fraction of hybrid cells beating the baseline
  std::size_t cases = 0;
};

struct ComparisonReport {
  std::vector<std::string> streams;
  std::vector<LearnerKind> learners;
  std::vector<StrategyRow> strategies;
  std::vector<double> budgets;
  std::vector<CellResult> cells;  // stream-major, then learner, row, budget
  std::vector<AggregateMeasure> by_budget;
  std::vector<AggregateMeasure> by_strategy;
  double fh = 0.0;               // over every hybrid cell
  double acc = 0.0;
  std::size_t runs_executed = 0;
  std::size_t failed_cells = 0;

  const CellResult& cell(std::size_t stream, std::size_t learner, std::size_t row, std::size_t budget) const {
    return cells[((stream * learners.size() + learner) * strategies.size() + row) * budgets.size() + budget];
  }

  /// Mean accuracy over every strategy row (and stream) for a learner and budget.
  double mean_accuracy(std::size_t learner, std::size_t budget) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t s = 0; s < streams.size(); ++s) {
      for (std::size_t r = 0; r < strategies.size(); ++r) {
        const auto& c = cell(s, learner, r, budget);
        if (c.error) continue;
        sum += c.accuracy;
        ++n;
      }
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
  }
};

/// Fills baseline / improvement / column-best flags and the Acc / Fh aggregates.
/// `cells` must follow the ComparisonReport ordering.
inline ComparisonReport make_report(std::vector<std::string> streams, std::vector<LearnerKind> learners,
                                    std::vector<StrategyRow> strategies, std::vector<double> budgets,
                                    std::vector<CellResult> cells) {
  ComparisonReport rep;
  rep.streams = std::move(streams);
  rep.learners = std::move(learners);
  rep.strategies = std::move(strategies);
  rep.budgets = std::move(budgets);
  rep.cells = std::move(cells);
  if (rep.cells.size() != rep.streams.size() * rep.learners.size() * rep.strategies.size() * rep.budgets.size()) {
    throw ConfigError("cell count does not match the grid shape");
  }

  auto at = [&](std::size_t s, std::size_t l, std::size_t r, std::size_t b) -> CellResult& {
    return rep.cells[((s * rep.learners.size() + l) * rep.strategies.size() + r) * rep.budgets.size() + b];
  };

  std::size_t hybrid_cases = 0, hybrid_wins = 0;
  double hybrid_sum = 0.0, all_sum = 0.0;
  std::size_t all_n = 0;
  for (std::size_t l = 0; l < rep.learners.size(); ++l) {
    for (std::size_t b = 0; b < rep.budgets.size(); ++b) {
      AggregateMeasure agg{rep.learners[l], rep.budgets[b], {}, 0.0, 0.0, 0};
      std::size_t wins = 0;
      for (std::size_t s = 0; s < rep.streams.size(); ++s) {
        double baseline = -1.0, best = -1.0;
        for (std::size_t r = 0; r < rep.strategies.size(); ++r) {
          const auto& c = at(s, l, r, b);
          if (c.error) continue;
          best = std::max(best, c.accuracy);
          if (rep.strategies[r].pure_active()) baseline = std::max(baseline, c.accuracy);
        }
        for (std::size_t r = 0; r < rep.strategies.size(); ++r) {
          auto& c = at(s, l, r, b);
          if (c.error) continue;
          c.baseline = baseline;
          c.improves = baseline >= 0.0 && c.accuracy > baseline;
          c.column_best = c.accuracy == best;
          all_sum += c.accuracy;
          ++all_n;
          if (!rep.strategies[r].pure_active()) {
            agg.acc += c.accuracy;
            ++agg.cases;
            wins += c.improves ? 1 : 0;
          }
        }
      }
      hybrid_cases += agg.cases;
      hybrid_wins += wins;
      hybrid_sum += agg.acc;
      if (agg.cases > 0) {
        agg.acc /= static_cast<double>(agg.cases);
        agg.fh = static_cast<double>(wins) / static_cast<double>(agg.cases);
      }
      rep.by_budget.push_back(agg);
    }
    for (std::size_t r = 0; r < rep.strategies.size(); ++r) {
      if (rep.strategies[r].pure_active()) continue;
      AggregateMeasure agg{rep.learners[l], std::nan(""), rep.strategies[r].label(), 0.0, 0.0, 0};
      std::size_t wins = 0;
      for (std::size_t s = 0; s < rep.streams.size(); ++s) {
        for (std::size_t b = 0; b < rep.budgets.size(); ++b) {
          const auto& c = at(s, l, r, b);
          if (c.error) continue;
          agg.acc += c.accuracy;
          ++agg.cases;
          wins += c.improves ? 1 : 0;
        }
      }
      if (agg.cases > 0) {
        agg.acc /= static_cast<double>(agg.cases);
        agg.fh = static_cast<double>(wins) / static_cast<double>(agg.cases);
      }
      rep.by_strategy.push_back(agg);
    }
  }
  rep.fh = hybrid_cases == 0 ? 0.0 : static_cast<double>(hybrid_wins) / static_cast<double>(hybrid_cases);
  rep.acc = hybrid_cases > 0 ? hybrid_sum / static_cast<double>(hybrid_cases)
                             : (all_n == 0 ? 0.0 : all_sum / static_cast<double>(all_n));
  rep.failed_cells = static_cast<std::size_t>(
      std::count_if(rep.cells.begin(), rep.cells.end(), [](const CellResult& c) { return c.error.has_value(); }));
  return rep;
}

/// Executes every run of the grid (in parallel up to grid.jobs threads) and
/// assembles the report. A failing run marks its cell; it does not abort the grid.
inline ComparisonReport run_grid(const ExperimentGrid& grid) {
  if (grid.seeds.empty()) throw ConfigError("grid needs at least one seed");
  struct RunOutcome {
    double accuracy = 0.0;
    double spend = 0.0;
    std::optional<std::string> error;
  };
  const std::size_t n_seeds = grid.seeds.size();
  const std::size_t total = grid.run_count();
  std::vector<RunOutcome> outcomes(total);

  auto execute = [&](std::size_t task) {
    std::size_t rest = task;
    const std::size_t seed = rest % n_seeds;
    rest /= n_seeds;
    const std::size_t budget = rest % grid.budgets.size();
    rest /= grid.budgets.size();
    const std::size_t row = rest % grid.strategies.size();
    rest /= grid.strategies.size();
    const std::size_t learner = rest % grid.learners.size();
    const std::size_t stream = rest / grid.learners.size();
    RunOutcome& out = outcomes[task];
    try {
      const auto& src = grid.streams[stream];
      const auto cfg = grid.run_config(learner, row, budget, seed);
      const auto res = run_stream(*src.instances, src.schema, cfg, {}, false);
      out.accuracy = res.summary.global_accuracy;
      out.spend = res.summary.final_spend;
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(grid.jobs, total));
  if (jobs == 1) {
    for (std::size_t t = 0; t < total; ++t) execute(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t j = 0; j < jobs; ++j) {
      workers.emplace_back([&] {
        for (std::size_t t = next++; t < total; t = next++) execute(t);
      });
    }
    for (auto& w : workers) w.join();
  }

  std::vector<CellResult> cells;
  cells.reserve(grid.cell_count());
  for (std::size_t s = 0; s < grid.streams.size(); ++s) {
    for (std::size_t l = 0; l < grid.learners.size(); ++l) {
      for (std::size_t r = 0; r < grid.strategies.size(); ++r) {
        for (std::size_t b = 0; b < grid.budgets.size(); ++b) {
          CellResult c;
          c.stream = grid.streams[s].name;
          c.learner = grid.learners[l];
          c.row = grid.strategies[r];
          c.budget = grid.budgets[b];
          double acc = 0.0, spend = 0.0;
          std::size_t ok = 0;
          const std::size_t base = (((s * grid.learners.size() + l) * grid.strategies.size() + r) * grid.budgets.size() + b) * n_seeds;
          for (std::size_t k = 0; k < n_seeds; ++k) {
            const auto& o = outcomes[base + k];
            if (o.error) {
              if (!c.error) c.error = o.error;
              continue;
            }
            c.seed_accuracies.push_back(o.accuracy);
            acc += o.accuracy;
            spend += o.spend;
            ++ok;
          }
          if (ok > 0) {
            c.accuracy = acc / static_cast<double>(ok);
            c.mean_spend = spend / static_cast<double>(ok);
          }
          cells.push_back(std::move(c));
        }
      }
    }
  }
  std::vector<std::string> names;
  for (const auto& s : grid.streams) names.push_back(s.name);
  auto rep = make_report(std::move(names), grid.learners, grid.strategies, grid.budgets, std::move(cells));
  rep.runs_executed = total;
  return rep;
}

}  // namespace driftlab
