#pragma once

// JSON forms of configurations, run summaries and comparison reports, plus the
// aligned-text rendering of comparison tables. Requires nlohmann/json.

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "driftlab/eval.hpp"

namespace driftlab {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// HybridConfig <-> JSON. Unknown keys are rejected.

namespace detail {

inline void reject_unknown(const json& j, const std::set<std::string>& allowed, std::string_view where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + std::string(where));
  }
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline json to_json(const HybridConfig& c) {
  json j;
  j["learner"] = std::string(to_string(c.learner.kind));
  j["al"] = std::string(to_string(c.active));
  j["sl"] = std::string(to_string(c.self_label));
  j["budget"] = c.budget;
  j["seed"] = c.seed;
  j["window"] = c.window;
  j["error_window"] = c.error_window;
  j["step"] = c.randvar.step;
  j["sigma"] = c.randvar.sigma;
  j["sl_step"] = c.uni.step;
  j["sl_sigma"] = c.uni.sigma;
  j["gamma"] = c.fixed_gamma;
  j["sampling_delta"] = c.sampling_delta ? json(*c.sampling_delta) : json(nullptr);
  j["ddm_min_instances"] = c.ddm.min_instances;
  j["eddm_min_errors"] = c.eddm.min_errors;
  j["nb"] = {{"smoothing", c.learner.nb.smoothing}, {"variance_floor", c.learner.nb.variance_floor}};
  j["ht"] = {{"delta", c.learner.ht.split_confidence},
             {"tau", c.learner.ht.tie_threshold},
             {"grace_period", c.learner.ht.grace_period},
             {"attribute_fraction", c.learner.ht.attribute_fraction}};
  j["awe"] = {{"chunk_size", c.learner.awe.chunk_size},
              {"max_members", c.learner.awe.max_members},
              {"member", std::string(to_string(c.learner.awe_member))}};
  return j;
}

inline const std::set<std::string>& hybrid_config_keys() {
  static const std::set<std::string> keys = {"learner", "al", "sl", "budget", "seed", "window", "error_window",
                                             "step", "sigma", "sl_step", "sl_sigma", "gamma", "sampling_delta",
                                             "ddm_min_instances", "eddm_min_errors", "nb", "ht", "awe"};
  return keys;
}

/// Applies the HybridConfig keys present in `j` on top of `c`. Keys outside
/// `extra_keys` and the config's own keys are rejected.
inline void apply_json(const json& j, HybridConfig& c, const std::set<std::string>& extra_keys = {}) {
  std::set<std::string> allowed = hybrid_config_keys();
  allowed.insert(extra_keys.begin(), extra_keys.end());
  detail::reject_unknown(j, allowed, "configuration");
  std::string s;
  if (j.contains("learner")) {
    detail::read_opt(j, "learner", s);
    c.learner.kind = parse_learner_kind(s);
  }
  if (j.contains("al")) {
    detail::read_opt(j, "al", s);
    c.active = parse_active_kind(s);
  }
  if (j.contains("sl")) {
    detail::read_opt(j, "sl", s);
    c.self_label = parse_self_label_kind(s);
  }
  detail::read_opt(j, "budget", c.budget);
  detail::read_opt(j, "seed", c.seed);
  detail::read_opt(j, "window", c.window);
  detail::read_opt(j, "error_window", c.error_window);
  detail::read_opt(j, "step", c.randvar.step);
  detail::read_opt(j, "sigma", c.randvar.sigma);
  detail::read_opt(j, "sl_step", c.uni.step);
  detail::read_opt(j, "sl_sigma", c.uni.sigma);
  detail::read_opt(j, "gamma", c.fixed_gamma);
  if (j.contains("sampling_delta")) {
    if (j["sampling_delta"].is_null()) {
      c.sampling_delta.reset();
    } else {
      double d = 0.0;
      detail::read_opt(j, "sampling_delta", d);
      c.sampling_delta = d;
    }
  }
  detail::read_opt(j, "ddm_min_instances", c.ddm.min_instances);
  detail::read_opt(j, "eddm_min_errors", c.eddm.min_errors);
  if (j.contains("nb")) {
    const auto& n = j["nb"];
    detail::reject_unknown(n, {"smoothing", "variance_floor"}, "nb");
    detail::read_opt(n, "smoothing", c.learner.nb.smoothing);
    detail::read_opt(n, "variance_floor", c.learner.nb.variance_floor);
  }
  if (j.contains("ht")) {
    const auto& h = j["ht"];
    detail::reject_unknown(h, {"delta", "tau", "grace_period", "attribute_fraction"}, "ht");
    detail::read_opt(h, "delta", c.learner.ht.split_confidence);
    detail::read_opt(h, "tau", c.learner.ht.tie_threshold);
    detail::read_opt(h, "grace_period", c.learner.ht.grace_period);
    detail::read_opt(h, "attribute_fraction", c.learner.ht.attribute_fraction);
  }
  if (j.contains("awe")) {
    const auto& a = j["awe"];
    detail::reject_unknown(a, {"chunk_size", "max_members", "member"}, "awe");
    detail::read_opt(a, "chunk_size", c.learner.awe.chunk_size);
    detail::read_opt(a, "max_members", c.learner.awe.max_members);
    if (a.contains("member")) {
      detail::read_opt(a, "member", s);
      c.learner.awe_member = parse_learner_kind(s);
    }
  }
}

inline json to_json(const RunSummary& s) {
  return {{"instances", s.instances},
          {"correct", s.correct},
          {"global_accuracy", s.global_accuracy},
          {"final_spend", s.final_spend},
          {"labeled_count", s.labeled},
          {"queried", s.queried},
          {"self_labeled", s.self_labeled},
          {"skipped", s.skipped},
          {"mean_windowed_accuracy", s.mean_windowed_accuracy},
          {"ddm_changes", s.ddm_changes},
          {"eddm_changes", s.eddm_changes}};
}

// ---------------------------------------------------------------------------
// Comparison report

/// JSON Lines: a header record, one record per cell, then the aggregates.
inline void write_report_jsonl(std::ostream& out, const ComparisonReport& rep, const json& header) {
  out << json{{"record", "grid"}, {"config", header}, {"runs", rep.runs_executed}, {"failed_cells", rep.failed_cells}}.dump()
      << '\n';
  for (const auto& c : rep.cells) {
    json j{{"record", "cell"},
           {"stream", c.stream},
           {"learner", std::string(to_string(c.learner))},
           {"strategy", c.row.label()},
           {"al", std::string(to_string(c.row.active))},
           {"sl", std::string(to_string(c.row.self_label))},
           {"budget", c.budget},
           {"accuracy", c.accuracy},
           {"seed_accuracies", c.seed_accuracies},
           {"mean_spend", c.mean_spend},
           {"baseline", c.baseline},
           {"improves", c.improves},
           {"column_best", c.column_best}};
    if (c.error) j["error"] = *c.error;
    out << j.dump() << '\n';
  }
  for (const auto& a : rep.by_budget) {
    out << json{{"record", "aggregate_budget"}, {"learner", std::string(to_string(a.learner))}, {"budget", a.budget},
                {"Acc", a.acc}, {"Fh", a.fh}, {"cases", a.cases}}
               .dump()
        << '\n';
  }
  for (const auto& a : rep.by_strategy) {
    out << json{{"record", "aggregate_strategy"}, {"learner", std::string(to_string(a.learner))}, {"strategy", a.strategy},
                {"Acc", a.acc}, {"Fh", a.fh}, {"cases", a.cases}}
               .dump()
        << '\n';
  }
  out << json{{"record", "aggregate_total"}, {"Acc", rep.acc}, {"Fh", rep.fh}}.dump() << '\n';
}

/// Strategies as rows, budgets as columns, one block per stream x learner.
/// '*' marks the column maximum, '+' a hybrid beating every pure-AL row.
inline void write_report_text(std::ostream& out, const ComparisonReport& rep) {
  auto pct = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
    return std::string(buf);
  };
  std::size_t label_w = 8;
  for (const auto& r : rep.strategies) label_w = std::max(label_w, r.label().size());
  const int col_w = 11;
  for (std::size_t s = 0; s < rep.streams.size(); ++s) {
    for (std::size_t l = 0; l < rep.learners.size(); ++l) {
      out << rep.streams[s] << " / " << to_string(rep.learners[l]) << '\n';
      out << std::left << std::setw(static_cast<int>(label_w) + 2) << "strategy";
      for (double b : rep.budgets) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "B=%g%%", 100.0 * b);
        out << std::right << std::setw(col_w) << buf;
      }
      out << '\n';
      for (std::size_t r = 0; r < rep.strategies.size(); ++r) {
        out << std::left << std::setw(static_cast<int>(label_w) + 2) << rep.strategies[r].label();
        for (std::size_t b = 0; b < rep.budgets.size(); ++b) {
          const auto& c = rep.cell(s, l, r, b);
          std::string v = c.error ? std::string("failed") : pct(c.accuracy);
          if (!c.error) v += std::string(c.column_best ? "*" : " ") + (c.improves ? "+" : " ");
          else v += "  ";
          out << std::right << std::setw(col_w) << v;
        }
        out << '\n';
      }
      out << '\n';
    }
  }
  out << "aggregates (hybrid rows)\n";
  for (const auto& a : rep.by_budget) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "  %-4s B=%-6g Acc=%s Fh=%.3f (%zu cases)\n", std::string(to_string(a.learner)).c_str(),
                  100.0 * a.budget, pct(a.acc).c_str(), a.fh, a.cases);
    out << buf;
  }
  for (const auto& a : rep.by_strategy) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "  %-4s %-10s Acc=%s Fh=%.3f (%zu cases)\n", std::string(to_string(a.learner)).c_str(),
                  a.strategy.c_str(), pct(a.acc).c_str(), a.fh, a.cases);
    out << buf;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "  total Acc=%s Fh=%.3f\n", pct(rep.acc).c_str(), rep.fh);
  out << buf;
  for (const auto& c : rep.cells) {
    if (c.error) out << "  failed: " << c.stream << " / " << to_string(c.learner) << " / " << c.row.label() << " / B=" << c.budget
                     << ": " << *c.error << '\n';
  }
}

}  // namespace driftlab
