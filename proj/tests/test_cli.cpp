#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "gfkchain/cli/commands.hpp"
#include "gfkchain/cli/config.hpp"
#include "gfkchain/cli/io.hpp"
#include "gfkchain/cli/report.hpp"

namespace fs = std::filesystem;
namespace cli = gfkchain::cli;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "gfkchain");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("gfkchain_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::string small_experiment_config(const TempDir& dir, const std::string& kernels = "\"both\"") {
  const fs::path p = dir / "config.json";
  spit(p, R"({"n_structures": 10, "intermediate_counts": [0, 1, 3], "n_trials": 3, "n_reps": 30,
             "base_seed": 5, "kernels": )" + kernels + "}");
  return p.string();
}

}  // namespace

TEST(Config, RoundTripsThroughJson) {
  gfkchain::chain::ChainConfig c;
  c.noise_coeff = 0.0123;
  c.kernels = {gfkchain::chain::KernelKind::gfk};
  c.schedule = gfkchain::sim::StiffnessSchedule::log;
  c.base_seed = 1ULL << 60;
  const auto back = cli::config_from_json(cli::config_to_json(c));
  EXPECT_EQ(cli::config_to_json(back), cli::config_to_json(c));
  EXPECT_EQ(back.base_seed, c.base_seed);
}

TEST(Config, EmptyObjectGivesDefaultsAndUnknownKeysAreRejected) {
  const auto c = cli::config_from_json(nlohmann::json::object());
  EXPECT_EQ(cli::config_to_json(c), cli::config_to_json(gfkchain::chain::ChainConfig{}));
  EXPECT_THROW(cli::config_from_json(nlohmann::json{{"noise", 0.1}}), cli::UserError);
  EXPECT_THROW(cli::config_from_json(nlohmann::json{{"n_trials", "many"}}), cli::UserError);
  EXPECT_THROW(cli::config_from_json(nlohmann::json{{"damage", {{"size", 1}}}}), cli::UserError);
}

TEST(FormatNumber, SixSignificantDigits) {
  EXPECT_EQ(cli::format_number(0.123456789), "0.123457");
  EXPECT_EQ(cli::format_number(1.0), "1");
  EXPECT_EQ(cli::format_number(1234567.0), "1.23457e+06");
}

TEST(GenerateChain, DefaultConfigWritesEightyStructures) {
  TempDir dir;
  const auto r = invoke({"generate-chain", "--out", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = lines(r.out);
  ASSERT_EQ(summary.size(), 81u);
  EXPECT_EQ(summary[0], "index,t,first_hz,last_hz");
  const auto table = lines(slurp(dir / "chain.csv"));
  ASSERT_EQ(table.size(), 81u);
  for (std::size_t i = 1; i < table.size(); ++i) {
    EXPECT_EQ(std::count(table[i].begin(), table[i].end(), ','), 16) << table[i];
  }
  EXPECT_TRUE(fs::exists(dir / "structures" / "structure_079" / "frequencies.csv"));
  const auto data = lines(slurp(dir / "structures" / "structure_000" / "dataset.csv"));
  EXPECT_EQ(data.size(), 201u);
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
}

TEST(GenerateChain, NStructuresOverride) {
  TempDir dir;
  const auto r = invoke({"generate-chain", "--n-structures", "5", "--out", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 6u);
  const char* expected_t[] = {"0", "0.25", "0.5", "0.75", "1"};
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(rows[i + 1].rfind(std::to_string(i) + "," + expected_t[i] + ",", 0), 0u) << rows[i + 1];
  }
}

TEST(GenerateChain, RerunFromManifestIsByteIdentical) {
  TempDir a, b;
  ASSERT_EQ(invoke({"generate-chain", "--n-structures", "6", "--seed", "17", "--out", a.path().string()}).code, 0);
  const auto r = invoke({"--from-manifest", (a / "manifest.json").string(), "--out", b.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(a / "chain.csv"), slurp(b / "chain.csv"));
  for (int i = 0; i < 6; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "structure_%03d", i);
    EXPECT_EQ(slurp(a.path() / "structures" / name / "dataset.csv"),
              slurp(b.path() / "structures" / name / "dataset.csv"));
  }
}

TEST(GenerateChain, UnreadableConfigIsUserError) {
  TempDir dir;
  EXPECT_EQ(invoke({"generate-chain", "--config", (dir / "missing.json").string()}).code, 2);
  spit(dir / "bad.json", "{ not json");
  EXPECT_EQ(invoke({"generate-chain", "--config", (dir / "bad.json").string()}).code, 2);
}

TEST(GenerateChain, WriteFailureIsIoError) {
  TempDir dir;
  spit(dir / "file", "x");
  const auto r = invoke({"generate-chain", "--n-structures", "3", "--out", (dir / "file" / "sub").string()});
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST(RunExperiment, WritesResultsSummaryAndManifest) {
  TempDir dir;
  const auto cfg = small_experiment_config(dir);
  const auto r = invoke({"run-experiment", "--config", cfg, "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(slurp(dir / "out" / "results.csv"));
  ASSERT_EQ(rows.size(), 1u + 3 * 2 * 3);
  EXPECT_EQ(rows[0], "trial,seed,kernel,n_intermediates,direct_acc,chain_acc,collapsed");
  const auto parsed = cli::parse_results_csv(slurp(dir / "out" / "results.csv"));
  for (const auto& row : parsed) {
    EXPECT_GE(row.direct_acc, 0.0);
    EXPECT_LE(row.direct_acc, 1.0);
    EXPECT_GE(row.chain_acc, 0.0);
    EXPECT_LE(row.chain_acc, 1.0);
    if (row.n_intermediates == 0) EXPECT_EQ(row.direct_acc, row.chain_acc);
  }
  const auto summary = lines(slurp(dir / "out" / "summary.csv"));
  ASSERT_EQ(summary.size(), 3u);
  EXPECT_EQ(summary[0], "kernel,direct,1IS,3IS");
  EXPECT_TRUE(fs::exists(dir / "out" / "manifest.json"));
  EXPECT_LE(fs::last_write_time(dir / "out" / "manifest.json"),
            fs::last_write_time(dir / "out" / "results.csv"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
  EXPECT_EQ(manifest["command"], "run-experiment");
  EXPECT_EQ(manifest["base_seed"], 5);
  EXPECT_EQ(manifest["config"]["n_trials"], 3);
  EXPECT_TRUE(manifest.contains("timestamp"));
}

TEST(RunExperiment, SingleTrialNoIntermediates) {
  TempDir dir;
  spit(dir / "c.json", R"({"n_structures": 8, "intermediate_counts": [0], "n_trials": 1, "n_reps": 30})");
  const auto r = invoke({"run-experiment", "--config", (dir / "c.json").string(), "--out", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto parsed = cli::parse_results_csv(slurp(dir / "results.csv"));
  ASSERT_EQ(parsed.size(), 2u);
  for (const auto& row : parsed) EXPECT_EQ(row.direct_acc, row.chain_acc);
}

TEST(RunExperiment, DefaultGridSummaryHasTenCells) {
  TempDir dir;
  const auto r = invoke({"run-experiment", "--n-trials", "1", "--out", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = lines(slurp(dir / "summary.csv"));
  ASSERT_EQ(summary.size(), 3u);
  EXPECT_EQ(summary[0], "kernel,direct,1IS,3IS,13IS,78IS");
  int cells = 0;
  for (std::size_t i = 1; i < summary.size(); ++i) {
    cells += static_cast<int>(std::count(summary[i].begin(), summary[i].end(), ','));
  }
  EXPECT_EQ(cells, 10);
}

TEST(RunExperiment, InvalidKernelListsChoices) {
  TempDir dir;
  const auto cfg = small_experiment_config(dir, "[\"rbf\"]");
  const auto r = invoke({"run-experiment", "--config", cfg, "--out", dir.path().string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("{linear, gfk}"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "results.csv"));
}

TEST(RunExperiment, ManifestRerunAndThreadCountAreByteIdentical) {
  TempDir dir;
  const auto cfg = small_experiment_config(dir);
  ASSERT_EQ(invoke({"run-experiment", "--config", cfg, "--threads", "3", "--out", (dir / "a").string()}).code, 0);
  ASSERT_EQ(invoke({"--from-manifest", (dir / "a" / "manifest.json").string(), "--threads", "1", "--out",
                    (dir / "b").string()})
                .code,
            0);
  for (const char* f : {"results.csv", "summary.csv", "cells.csv", "comparisons.csv", "failures.csv"}) {
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
}

TEST(Manifest, RejectsForeignFiles) {
  TempDir dir;
  spit(dir / "m.json", R"({"hello": 1})");
  EXPECT_EQ(invoke({"--from-manifest", (dir / "m.json").string()}).code, 2);
  EXPECT_EQ(invoke({"--from-manifest", (dir / "none.json").string()}).code, 2);
}

TEST(Report, TwoKernelsGiveTwoPolylinesMatchingSummary) {
  TempDir dir;
  const auto cfg = small_experiment_config(dir);
  ASSERT_EQ(invoke({"run-experiment", "--config", cfg, "--out", dir.path().string()}).code, 0);
  const auto r = invoke({"report", (dir / "results.csv").string(), "--svg", (dir / "plot.svg").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string svg = slurp(dir / "plot.svg");
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);

  std::regex poly(R"re(<polyline data-kernel="(\w+)" data-values="([^"]*)")re");
  std::map<std::string, std::vector<double>> plotted;
  for (std::sregex_iterator it(svg.begin(), svg.end(), poly), end; it != end; ++it) {
    std::istringstream vs((*it)[2].str());
    double v = 0;
    while (vs >> v) plotted[(*it)[1].str()].push_back(v);
  }
  ASSERT_EQ(plotted.size(), 2u);
  const auto summary = lines(slurp(dir / "summary.csv"));
  for (std::size_t i = 1; i < summary.size(); ++i) {
    std::istringstream row(summary[i]);
    std::string kernel, cell;
    std::getline(row, kernel, ',');
    std::size_t col = 0;
    while (std::getline(row, cell, ',')) {
      ASSERT_LT(col, plotted[kernel].size());
      EXPECT_NEAR(plotted[kernel][col], std::stod(cell), 0.0005 + 1e-12) << kernel << " col " << col;
      ++col;
    }
  }
}

TEST(Report, EmptyResultsSayNoRows) {
  TempDir dir;
  spit(dir / "empty.csv", std::string(cli::kResultsHeader) + "\n");
  const auto r = invoke({"report", (dir / "empty.csv").string(), "--out", dir.path().string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("no rows"), std::string::npos);
}

TEST(Report, MalformedLineIsReported) {
  TempDir dir;
  spit(dir / "bad.csv", std::string(cli::kResultsHeader) + "\n0,1,gfk,0,0.5,0.5,0\n1,2,gfk,zero,0.5,0.5,0\n");
  const auto r = invoke({"report", (dir / "bad.csv").string(), "--out", dir.path().string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
  EXPECT_EQ(invoke({"run-experiment", "--threads", "-2"}).code, 2);
}
