#include <gtest/gtest.h>

#include <sstream>

#include "commands.hpp"
#include "support.hpp"

using namespace driftlab;
using testing_support::read_file;
using testing_support::TempDir;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(int (*cmd)(const std::vector<std::string>&, std::ostream&, std::ostream&), std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cmd(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t line_count(const std::string& s) {
  std::size_t n = 0;
  for (char ch : s) n += ch == '\n' ? 1 : 0;
  return n;
}

}  // namespace

TEST(CliRun, InvUncRequiresRandVar) {
  auto r = run(cli::cmd_run, {"--stream", "gen:n=500", "--sl", "invunc", "--al", "random"});
  EXPECT_EQ(r.code, cli::kConfig);
  EXPECT_NE(r.err.find("--al"), std::string::npos);
  EXPECT_NE(r.err.find("randvar"), std::string::npos);
}

TEST(CliRun, ZeroBudgetLabelsNothing) {
  auto r = run(cli::cmd_run, {"--stream", "gen:n=2000", "--budget", "0", "--sl", "none"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["labeled_count"], 0);
  EXPECT_EQ(j["labeled_fraction"], 0.0);
}

TEST(CliRun, SeriesRowsAtStrideAndReadable) {
  TempDir dir;
  const auto series = dir.file("series.csv"), summary = dir.file("summary.json");
  auto r = run(cli::cmd_run, {"--stream", "gen:kind=sudden,n=20000,change=10000", "--al", "randvar", "--sl", "winerr",
                              "--budget", "0.05", "--seed", "3", "--series-out", series, "--summary-out", summary});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = read_file(series);
  EXPECT_EQ(line_count(text), 201u);
  const auto rows = read_csv(series, cli::series_schema());
  ASSERT_EQ(rows.size(), 200u);
  EXPECT_EQ(rows.front().features[0].value(), 100.0);
  EXPECT_EQ(rows.back().features[0].value(), 20000.0);
  for (const auto& row : rows) EXPECT_LE(row.features[2].value(), 0.05 + 1.0 / row.features[0].value());

  const auto echo = json::parse(read_file(series + ".config.json"));
  EXPECT_EQ(echo["config"]["seed"], 3);
  EXPECT_EQ(echo["source"]["generator"]["change_points"], json::array({10000}));
  EXPECT_EQ(json::parse(read_file(summary)), json::parse(r.out));
  EXPECT_EQ(json::parse(r.out)["resolved"]["config"]["budget"], 0.05);
}

TEST(CliRun, RepeatedRunsAreByteIdentical) {
  TempDir dir;
  std::string outs[2];
  for (int k = 0; k < 2; ++k) {
    const auto s = dir.file("s" + std::to_string(k) + ".csv");
    auto r = run(cli::cmd_run, {"--stream", "gen:kind=gradual,n=3000,change=1500,width=500", "--learner", "ht", "--sl",
                                "ceddm", "--budget", "0.1", "--seed", "8", "--series-out", s});
    ASSERT_EQ(r.code, 0) << r.err;
    outs[k] = read_file(s) + r.out;
  }
  EXPECT_EQ(outs[0], outs[1]);
}

TEST(CliRun, ConfigFileAndFlagOverrides) {
  TempDir dir;
  const auto cfg = dir.file("run.json");
  testing_support::write_file(cfg, R"({"stream": "gen:n=1000", "budget": 0.2, "sl": "fixed", "gamma": 0.9})");
  auto r = run(cli::cmd_run, {"--config", cfg, "--budget", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out)["resolved"]["config"];
  EXPECT_EQ(j["budget"], 0.1);
  EXPECT_EQ(j["sl"], "fixed");

  testing_support::write_file(cfg, R"({"stream": "gen:n=1000", "budgett": 0.2})");
  r = run(cli::cmd_run, {"--config", cfg});
  EXPECT_EQ(r.code, cli::kConfig);
  EXPECT_NE(r.err.find("budgett"), std::string::npos);
}

TEST(CliRun, ErrorsNameTheFlag) {
  auto r = run(cli::cmd_run, {"--stream", "gen:n=100", "--budget", "1.5"});
  EXPECT_EQ(r.code, cli::kConfig);
  EXPECT_NE(r.err.find("--budget"), std::string::npos);
  r = run(cli::cmd_run, {"--stream", "gen:n=100", "--learner", "svm"});
  EXPECT_EQ(r.code, cli::kConfig);
  EXPECT_NE(r.err.find("--learner"), std::string::npos);
  r = run(cli::cmd_run, {"--stream", "/nonexistent/stream.csv"});
  EXPECT_EQ(r.code, cli::kIo);
  r = run(cli::cmd_run, {"--sl", "none"});
  EXPECT_EQ(r.code, cli::kConfig);
}

TEST(CliGenerate, WritesRowsAndSidecar) {
  TempDir dir;
  const auto path = dir.file("g.csv");
  auto r = run(cli::cmd_generate, {"--kind", "sudden", "--n", "10000", "--change", "5000", "--seed", "2", "--out", path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(read_file(path)), 10001u);
  EXPECT_EQ(read_csv(path).instances.size(), 10000u);
  const auto profile = json::parse(read_file(path + ".profile.json"));
  EXPECT_EQ(profile["change_points"], json::array({5000}));
  EXPECT_EQ(profile["seed"], 2);
}

TEST(CliGenerate, Deterministic) {
  TempDir dir;
  for (auto width : {"0", "200"}) {
    const auto a = dir.file("a.csv"), b = dir.file("b.csv");
    std::vector<std::string> args = {"--kind", width == std::string("0") ? "sudden" : "gradual", "--width", width,
                                     "--family", "sea-like-thresholds", "--n", "3000", "--change", "1000/2000"};
    auto ra = args, rb = args;
    ra.insert(ra.end(), {"--out", a});
    rb.insert(rb.end(), {"--out", b});
    const auto first = run(cli::cmd_generate, ra);
    ASSERT_EQ(first.code, 0) << first.err;
    ASSERT_EQ(run(cli::cmd_generate, rb).code, 0);
    EXPECT_EQ(read_file(a), read_file(b));
    EXPECT_EQ(read_file(a + ".profile.json"), read_file(b + ".profile.json"));
  }
}

TEST(CliGenerate, SuddenWithWidthRejected) {
  TempDir dir;
  auto r = run(cli::cmd_generate, {"--kind", "sudden", "--width", "100", "--out", dir.file("x.csv")});
  EXPECT_EQ(r.code, cli::kConfig);
  r = run(cli::cmd_generate, {"--kind", "sideways", "--out", dir.file("x.csv")});
  EXPECT_EQ(r.code, cli::kConfig);
}

TEST(CliCompare, GridRunCount) {
  TempDir dir;
  const auto jl = dir.file("r.jsonl");
  auto r = run(cli::cmd_compare, {"--stream", "gen:n=1200,seed=1", "--stream", "gen:n=1200,seed=2", "--al", "random,randvar",
                                  "--sl", "winerr", "--budgets", "0.05,0.2", "--seeds", "3", "--jsonl-out", jl});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(read_file(jl));
  std::string line;
  std::size_t cells = 0, runs = 0;
  while (std::getline(lines, line)) {
    const auto j = json::parse(line);
    if (j["record"] == "cell") {
      ++cells;
      runs += j["seed_accuracies"].size();
    }
    if (j["record"] == "grid") {
      EXPECT_EQ(j["runs"], 36);
      EXPECT_EQ(j["config"]["strategies"], json::array({"ALR", "ALRV", "WinErr"}));
    }
  }
  EXPECT_EQ(cells, 12u);
  EXPECT_EQ(runs, 36u);
  EXPECT_NE(r.out.find("B=5%"), std::string::npos);
  EXPECT_NE(r.out.find("Fh="), std::string::npos);
}

TEST(CliCompare, DefaultBudgets) {
  auto r = run(cli::cmd_compare, {"--stream", "gen:n=600", "--al", "randvar", "--sl", "fixed"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (auto b : {"B=1%", "B=5%", "B=10%", "B=20%", "B=50%"}) EXPECT_NE(r.out.find(b), std::string::npos) << b;
  EXPECT_EQ(default_budgets(), (std::vector<double>{0.01, 0.05, 0.10, 0.20, 0.50}));
}

TEST(CliCompare, InvalidRowRejected) {
  auto r = run(cli::cmd_compare, {"--stream", "gen:n=600", "--sl", "invunc", "--base-al", "random"});
  EXPECT_EQ(r.code, cli::kConfig);
}

TEST(CliDispatch, UsageAndUnknownCommand) {
  std::ostringstream out, err;
  const char* argv1[] = {"driftlab", "frobnicate"};
  EXPECT_EQ(cli::dispatch(2, const_cast<char**>(argv1), out, err), cli::kConfig);
  const char* argv2[] = {"driftlab", "--help"};
  EXPECT_EQ(cli::dispatch(2, const_cast<char**>(argv2), out, err), 0);
  EXPECT_NE(out.str().find("usage"), std::string::npos);
}
