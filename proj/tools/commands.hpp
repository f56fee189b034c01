#pragma once

// The driftlab command-line front end: run, compare, generate. Each command
// takes its arguments (without the program and command names) and returns the
// process exit code, so tests can drive the commands in-process.
//
// Exit codes: 0 success, 1 unexpected failure, 2 bad configuration or drift
// profile, 3 input/output failure (unreadable, unwritable or malformed files).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "driftlab/generators.hpp"
#include "driftlab/io.hpp"
#include "driftlab/serialization.hpp"

namespace driftlab::cli {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kIo = 3 };

/// Parameters of a generated stream, given as
/// gen:kind=sudden,family=gaussian-clusters,n=20000,change=10000,width=0,seed=1
/// (several change points separated by '/').
struct GenSpec {
  DriftProfile profile;
  ConceptFamily family = ConceptFamily::GaussianClusters;
  std::size_t n = 20000;
  std::uint64_t seed = 1;
  GeneratorOptions options;
  bool change_given = false;

  void finish() {
    if (!change_given) profile.change_points = {n / 2};
  }

  json to_json() const {
    return {{"kind", std::string(driftlab::to_string(profile.kind))},
            {"family", std::string(driftlab::to_string(family))},
            {"n", n},
            {"seed", seed},
            {"change_points", profile.change_points},
            {"transition_width", profile.transition_width},
            {"recurring_concepts", profile.recurring_concepts},
            {"dims", options.dims},
            {"classes", options.classes},
            {"spread", options.spread},
            {"min_separation", options.min_separation},
            {"label_noise", options.label_noise}};
  }
};

namespace detail {

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v + "'");
  return out;
}

inline double parse_real(const std::string& key, const std::string& v) {
  auto d = driftlab::detail::parse_number(v);
  if (!d) throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  return *d;
}

inline std::vector<std::size_t> parse_change_points(const std::string& v) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto slash = v.find('/', start);
    const auto part = v.substr(start, slash == std::string::npos ? std::string::npos : slash - start);
    if (!part.empty()) out.push_back(parse_uint("change", part));
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  return out;
}

inline void set_gen_key(GenSpec& g, const std::string& key, const std::string& v) {
  if (key == "kind") g.profile.kind = parse_drift_kind(v);
  else if (key == "family") g.family = parse_concept_family(v);
  else if (key == "n") g.n = parse_uint(key, v);
  else if (key == "seed") g.seed = parse_uint(key, v);
  else if (key == "change") {
    g.profile.change_points = parse_change_points(v);
    g.change_given = true;
  } else if (key == "width") g.profile.transition_width = parse_uint(key, v);
  else if (key == "concepts") g.profile.recurring_concepts = parse_uint(key, v);
  else if (key == "dims") g.options.dims = parse_uint(key, v);
  else if (key == "classes") g.options.classes = parse_uint(key, v);
  else if (key == "spread") g.options.spread = parse_real(key, v);
  else if (key == "separation") g.options.min_separation = parse_real(key, v);
  else if (key == "noise") g.options.label_noise = parse_real(key, v);
  else throw ConfigError("unknown generator key '" + key + "'");
}

}  // namespace detail

inline GenSpec parse_gen_spec(std::string_view spec) {
  if (spec.substr(0, 4) == "gen:") spec.remove_prefix(4);
  GenSpec g;
  for (const auto& item : driftlab::detail::split_fields(spec)) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("generator option '" + item + "' is not key=value");
    detail::set_gen_key(g, item.substr(0, eq), item.substr(eq + 1));
  }
  g.finish();
  return g;
}

inline bool is_gen_spec(std::string_view s) { return s.substr(0, 4) == "gen:"; }

/// Loads a stream from a file (csv or arff; inferred from the extension when
/// `format` is empty) or a gen: specification.
inline LoadedStream load_stream(const std::string& source, const std::string& format, json* echo = nullptr) {
  if (is_gen_spec(source)) {
    GenSpec g = parse_gen_spec(source);
    auto gen = gen_drift_stream(g.profile, g.family, g.n, g.seed, g.options);
    if (echo) *echo = {{"generator", g.to_json()}};
    return {std::move(gen.schema), std::move(gen.instances)};
  }
  std::string fmt = format;
  if (fmt.empty()) {
    const auto ext = driftlab::detail::lower(std::filesystem::path(source).extension().string());
    fmt = ext == ".arff" ? "arff" : "csv";
  }
  if (echo) *echo = {{"path", source}, {"format", fmt}};
  if (fmt == "csv") return read_csv(source);
  if (fmt == "arff") return read_arff(source);
  throw ConfigError("--format must be csv or arff, got '" + fmt + "'");
}

/// Schema of the series files written by `run`.
inline StreamSchema series_schema() {
  return StreamSchema({Attribute::numeric("seen"), Attribute::numeric("windowed_accuracy"), Attribute::numeric("spend"),
                       Attribute::numeric("labeled"), Attribute::numeric("queried"), Attribute::numeric("self_labeled"),
                       Attribute::numeric("skipped")},
                      {"queried", "self_labeled", "skipped"}, "action");
}

namespace detail {

/// Runs `fn`, prefixing any ConfigError with the flag it came from.
template <class F>
void for_flag(const std::string& flag, F&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    throw ConfigError(flag + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw IoError("failed writing '" + path + "'");
}

inline json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline int report_errors(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const CLI::Error&) {
    throw;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const InvalidProfile& e) {
    err << "error: invalid drift profile: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

/// Parses `args` with `app`; returns an exit code when parsing ends the command.
inline std::optional<int> parse_args(CLI::App& app, std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfig;
  }
  return std::nullopt;
}

inline std::size_t resolve_jobs(std::size_t flag) {
  if (const char* env = std::getenv("DRIFTLAB_JOBS"); env && *env) {
    try {
      return std::max<std::size_t>(1, parse_uint("DRIFTLAB_JOBS", env));
    } catch (const ConfigError&) {
      throw ConfigError(std::string("DRIFTLAB_JOBS must be a positive integer, got '") + env + "'");
    }
  }
  return std::max<std::size_t>(1, flag);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// run

inline int cmd_run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Run the hybrid loop once over a stream", "driftlab run"};
  std::string config_path, stream, format, learner, al, sl, series_out, summary_out;
  double budget = 0, step = 0, sigma = 0, gamma = 0;
  std::uint64_t seed = 0;
  std::size_t window = 0, error_window = 0, stride = 100;
  app.add_option("--config", config_path, "JSON run specification; flags override its values");
  auto* o_stream = app.add_option("--stream", stream, "input path or gen:key=value,...");
  auto* o_format = app.add_option("--format", format, "csv|arff (default: by extension)");
  auto* o_learner = app.add_option("--learner", learner, "nb|ht|awe");
  auto* o_al = app.add_option("--al", al, "random|sampling|randvar");
  auto* o_sl = app.add_option("--sl", sl, "none|fixed|uni|randuni|invunc|cddm|ceddm|winerr");
  auto* o_budget = app.add_option("--budget", budget, "labeling budget B in [0, 1]");
  auto* o_seed = app.add_option("--seed", seed, "random seed");
  auto* o_window = app.add_option("--window", window, "prequential window (default 1000)");
  auto* o_ewin = app.add_option("--error-window", error_window, "WinErr window (default 100)");
  auto* o_step = app.add_option("--step", step, "threshold adjustment step s (default 0.01)");
  auto* o_sigma = app.add_option("--sigma", sigma, "threshold randomization sigma (default 1)");
  auto* o_gamma = app.add_option("--gamma", gamma, "fixed self-labeling threshold (default 0.95)");
  auto* o_series = app.add_option("--series-out", series_out, "CSV of windowed accuracy and spend");
  auto* o_summary = app.add_option("--summary-out", summary_out, "JSON summary record");
  auto* o_stride = app.add_option("--stride", stride, "series row every this many instances (default 100)");
  if (auto rc = detail::parse_args(app, args, out, err)) return *rc;

  return detail::report_errors(err, [&]() -> int {
    HybridConfig cfg;
    static const std::set<std::string> run_keys = {"stream", "format", "series_out", "summary_out", "stride"};
    if (!config_path.empty()) {
      const json spec = detail::read_json_file(config_path);
      detail::for_flag("--config", [&] { apply_json(spec, cfg, run_keys); });
      detail::for_flag("--config", [&] {
        if (!o_stream->count()) driftlab::detail::read_opt(spec, "stream", stream);
        if (!o_format->count()) driftlab::detail::read_opt(spec, "format", format);
        if (!o_series->count()) driftlab::detail::read_opt(spec, "series_out", series_out);
        if (!o_summary->count()) driftlab::detail::read_opt(spec, "summary_out", summary_out);
        if (!o_stride->count()) driftlab::detail::read_opt(spec, "stride", stride);
      });
    }
    if (o_learner->count()) detail::for_flag("--learner", [&] { cfg.learner.kind = parse_learner_kind(learner); });
    if (o_al->count()) detail::for_flag("--al", [&] { cfg.active = parse_active_kind(al); });
    if (o_sl->count()) detail::for_flag("--sl", [&] { cfg.self_label = parse_self_label_kind(sl); });
    if (o_budget->count()) cfg.budget = budget;
    if (o_seed->count()) cfg.seed = seed;
    if (o_window->count()) cfg.window = window;
    if (o_ewin->count()) cfg.error_window = error_window;
    if (o_step->count()) cfg.randvar.step = cfg.uni.step = step;
    if (o_sigma->count()) cfg.randvar.sigma = cfg.uni.sigma = sigma;
    if (o_gamma->count()) cfg.fixed_gamma = gamma;

    detail::for_flag("--budget", [&] {
      if (!(cfg.budget >= 0.0 && cfg.budget <= 1.0)) throw ConfigError("budget must lie in [0, 1]");
    });
    detail::for_flag(cfg.self_label == SelfLabelKind::InvUnc && o_al->count() ? "--al" : "--sl", [&] { cfg.validate(); });
    detail::for_flag("--stride", [&] {
      if (stride == 0) throw ConfigError("stride must be positive");
    });
    if (stream.empty()) throw ConfigError("--stream is required");

    json source;
    LoadedStream loaded;
    detail::for_flag("--stream", [&] { loaded = load_stream(stream, format, &source); });
    auto schema = std::make_shared<const StreamSchema>(std::move(loaded.schema));
    HybridLearner loop(cfg, schema);

    const json echo = {{"config", to_json(cfg)}, {"stream", stream}, {"source", source}, {"stride", stride}};

    std::ofstream series;
    if (!series_out.empty()) {
      series.open(series_out, std::ios::binary);
      if (!series) throw IoError("cannot open '" + series_out + "' for writing");
      const auto ss = series_schema();
      for (std::size_t i = 0; i < ss.attribute_count(); ++i) series << ss.attribute(i).name << ',';
      series << "action\n";
    }
    const auto result = run_stream(
        loop, loaded.instances,
        [&](const StepRecord& r) {
          if (!series.is_open() || r.seen % stride != 0) return;
          const auto s = loop.summary();
          series << r.seen << ',' << format_real(r.windowed_accuracy) << ','
                 << format_real(static_cast<double>(r.labeled) / static_cast<double>(r.seen)) << ',' << r.labeled << ','
                 << s.queried << ',' << s.self_labeled << ',' << s.skipped << ',' << to_string(r.action) << '\n';
        },
        false);
    if (series.is_open()) {
      series.close();
      if (!series) throw IoError("failed writing '" + series_out + "'");
      detail::write_text_file(series_out + ".config.json", echo.dump(2) + "\n");
    }

    json summary = to_json(result.summary);
    summary["labeled_fraction"] = result.summary.final_spend;
    summary["resolved"] = echo;
    const std::string text = summary.dump() + "\n";
    if (!summary_out.empty()) detail::write_text_file(summary_out, text);
    out << text;
    return kOk;
  });
}

// ---------------------------------------------------------------------------
// compare

inline int cmd_compare(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Run a strategy x budget comparison grid", "driftlab compare"};
  std::string config_path, format, text_out, jsonl_out, base_al = "randvar";
  std::vector<std::string> streams, learners = {"nb"}, als = {"random", "sampling", "randvar"},
                                    sls = {"fixed", "uni", "randuni", "invunc", "cddm", "ceddm", "winerr"};
  std::vector<double> budgets = default_budgets();
  std::size_t seeds = 1, jobs = 1;
  std::uint64_t seed_base = 1;
  app.add_option("--stream", streams, "input path or gen:spec (repeatable)")->required();
  app.add_option("--format", format, "csv|arff (default: by extension)");
  app.add_option("--learner", learners, "learners, comma separated")->delimiter(',');
  app.add_option("--al", als, "pure active-learning rows, comma separated")->delimiter(',');
  app.add_option("--sl", sls, "self-labeling rows, comma separated")->delimiter(',');
  app.add_option("--base-al", base_al, "query strategy under the self-labeling rows (default randvar)");
  app.add_option("--budgets", budgets, "budgets, comma separated")->delimiter(',');
  app.add_option("--seeds", seeds, "number of seeds per cell (seed-base, seed-base+1, ...)");
  app.add_option("--seed-base", seed_base, "first seed");
  app.add_option("--jobs", jobs, "parallel runs (DRIFTLAB_JOBS overrides)");
  app.add_option("--config", config_path, "JSON with shared run settings");
  app.add_option("--text-out", text_out, "aligned text report (default: stdout)");
  app.add_option("--jsonl-out", jsonl_out, "JSON Lines report");
  if (auto rc = detail::parse_args(app, args, out, err)) return *rc;

  return detail::report_errors(err, [&]() -> int {
    ExperimentGrid grid;
    if (!config_path.empty()) {
      const json spec = detail::read_json_file(config_path);
      detail::for_flag("--config", [&] { apply_json(spec, grid.base); });
    }
    for (const auto& l : learners) detail::for_flag("--learner", [&] { grid.learners.push_back(parse_learner_kind(l)); });
    std::vector<ActiveKind> active;
    std::vector<SelfLabelKind> self;
    for (const auto& a : als) detail::for_flag("--al", [&] { active.push_back(parse_active_kind(a)); });
    for (const auto& s : sls) detail::for_flag("--sl", [&] { self.push_back(parse_self_label_kind(s)); });
    ActiveKind base = ActiveKind::RandVar;
    detail::for_flag("--base-al", [&] { base = parse_active_kind(base_al); });
    grid.strategies = table_rows(active, self, base);
    detail::for_flag("--sl", [&] {
      if (grid.strategies.empty()) throw ConfigError("no strategy rows selected");
      for (const auto& r : grid.strategies) {
        HybridConfig probe = grid.base;
        probe.active = r.active;
        probe.self_label = r.self_label;
        probe.validate();
      }
    });
    detail::for_flag("--budgets", [&] {
      if (budgets.empty()) throw ConfigError("no budgets given");
      for (double b : budgets) {
        if (!(b >= 0.0 && b <= 1.0)) throw ConfigError("budget must lie in [0, 1]");
      }
    });
    grid.budgets = budgets;
    detail::for_flag("--seeds", [&] {
      if (seeds == 0) throw ConfigError("need at least one seed");
    });
    grid.seeds.clear();
    for (std::size_t k = 0; k < seeds; ++k) grid.seeds.push_back(seed_base + k);
    detail::for_flag("--jobs", [&] { grid.jobs = detail::resolve_jobs(jobs); });

    json sources = json::array();
    for (const auto& s : streams) {
      json echo;
      LoadedStream loaded;
      detail::for_flag("--stream", [&] { loaded = load_stream(s, format, &echo); });
      const std::string name = is_gen_spec(s) ? s : std::filesystem::path(s).stem().string();
      grid.streams.push_back({name, std::make_shared<const StreamSchema>(std::move(loaded.schema)),
                              std::make_shared<const std::vector<Instance>>(std::move(loaded.instances))});
      sources.push_back({{"name", name}, {"stream", s}, {"source", echo}});
    }

    const auto report = run_grid(grid);

    json header = {{"base", to_json(grid.base)}, {"streams", sources}, {"budgets", grid.budgets}, {"seeds", grid.seeds},
                   {"base_al", std::string(to_string(base))}};
    header["learners"] = json::array();
    for (auto l : grid.learners) header["learners"].push_back(std::string(to_string(l)));
    header["strategies"] = json::array();
    for (const auto& r : grid.strategies) header["strategies"].push_back(r.label());

    std::ostringstream text;
    write_report_text(text, report);
    if (text_out.empty()) out << text.str();
    else detail::write_text_file(text_out, text.str());
    if (!jsonl_out.empty()) {
      std::ostringstream j;
      write_report_jsonl(j, report, header);
      detail::write_text_file(jsonl_out, j.str());
    }
    if (report.failed_cells > 0) err << "warning: " << report.failed_cells << " cell(s) failed; see the report\n";
    return kOk;
  });
}

// ---------------------------------------------------------------------------
// generate

inline int cmd_generate(const std::vector<std::string>& args, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
  CLI::App app{"Write a synthetic drifting stream as CSV", "driftlab generate"};
  std::string kind = "sudden", family = "gaussian-clusters", out_path, change;
  GenSpec g;
  app.add_option("--kind", kind, "sudden|gradual|incremental|recurring");
  app.add_option("--family", family, "gaussian-clusters|rotating-hyperplane|sea-like-thresholds");
  app.add_option("--n", g.n, "number of instances");
  app.add_option("--seed", g.seed, "random seed");
  auto* o_change = app.add_option("--change", change, "change points separated by '/' or ',' (default n/2)");
  app.add_option("--width", g.profile.transition_width, "transition width (0 for sudden)");
  app.add_option("--concepts", g.profile.recurring_concepts, "concept cycle length for recurring drift");
  app.add_option("--dims", g.options.dims, "attributes (gaussian-clusters, rotating-hyperplane)");
  app.add_option("--classes", g.options.classes, "classes (gaussian-clusters)");
  app.add_option("--spread", g.options.spread, "cluster standard deviation");
  app.add_option("--noise", g.options.label_noise, "label noise probability");
  app.add_option("--out", out_path, "output CSV path")->required();
  if (auto rc = detail::parse_args(app, args, out, err)) return *rc;

  return detail::report_errors(err, [&]() -> int {
    detail::for_flag("--kind", [&] { g.profile.kind = parse_drift_kind(kind); });
    detail::for_flag("--family", [&] { g.family = parse_concept_family(family); });
    if (o_change->count()) {
      std::string c = change;
      std::replace(c.begin(), c.end(), ',', '/');
      detail::for_flag("--change", [&] { g.profile.change_points = detail::parse_change_points(c); });
      g.change_given = true;
    }
    g.finish();
    const auto stream = gen_drift_stream(g.profile, g.family, g.n, g.seed, g.options);
    write_csv(out_path, stream.schema, stream.instances);
    detail::write_text_file(out_path + ".profile.json", g.to_json().dump(2) + "\n");
    return kOk;
  });
}

inline int dispatch(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  const std::string usage =
      "usage: driftlab <run|compare|generate> [options]\n"
      "       driftlab <command> --help\n";
  if (argc < 2) {
    err << usage;
    return kConfig;
  }
  const std::string cmd = argv[1];
  std::vector<std::string> args(argv + 2, argv + argc);
  if (cmd == "run") return cmd_run(args, out, err);
  if (cmd == "compare") return cmd_compare(args, out, err);
  if (cmd == "generate") return cmd_generate(args, out, err);
  if (cmd == "--help" || cmd == "-h" || cmd == "help") {
    out << usage;
    return kOk;
  }
  err << "error: unknown command '" << cmd << "'\n" << usage;
  return kConfig;
}

}  // namespace driftlab::cli
