#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dfl/harness.hpp"

using namespace dfl;
using namespace dfl::harness;

namespace {

const char* kMinimal = R"(schema_version = 1
problem = shortest_path
grid = 3x3
methods = spo+
)";

bool has_error(const ValidationResult& v, const std::string& needle) {
  for (const auto& e : v.errors)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

std::string strip_timing(const std::string& row) {
  std::string out = row;
  for (std::size_t k = 0; k < kTimingColumns; ++k) out.resize(out.rfind(','));
  return out;
}

ExperimentConfig small_config() {
  auto v = parse_config(R"(schema_version = 1
problem = shortest_path
grid = 3x3
n_train = 60
n_test = 40
deg = 4
noise = 0.5
methods = 2s-lr, 2s-knn, spo+, dbb, dpo, pfyl, spo+-l1
samples = 2
epochs = 2
repetitions = 2
seed = 99
)");
  EXPECT_TRUE(v.ok());
  return *v.config;
}

}  // namespace

TEST(Config, MinimalParsesAndEchoes) {
  const auto v = parse_config(kMinimal);
  ASSERT_TRUE(v.ok()) << v.errors.front();
  EXPECT_EQ(v.config->problem, Problem::ShortestPath);
  EXPECT_EQ(v.config->grid_height, 3u);
  EXPECT_EQ(v.config->n_test, 1000u);
  const auto again = parse_config(v.config->canonical());
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(again.config->canonical(), v.config->canonical());
}

TEST(Config, LambdaMustBePositive) {
  const auto v = parse_config(std::string(kMinimal) + "methods = dbb\n");
  EXPECT_TRUE(has_error(v, "duplicate key"));
  const auto w = parse_config(
      "schema_version = 1\nproblem = knapsack\nmethods = dbb\nlambda = 0\n");
  EXPECT_TRUE(has_error(w, "lambda must be positive"));
}

TEST(Config, RelaxationOnShortestPathRejected) {
  const auto v = parse_config("schema_version = 1\nproblem = shortest_path\nmethods = spo+-rel\n");
  ASSERT_FALSE(v.ok());
  EXPECT_TRUE(has_error(v, "totally unimodular"));
}

TEST(Config, AllViolationsListed) {
  const auto v = parse_config(R"(schema_version = 1
problem = tsp
nodes = 15
methods = pfyl-rel, dbb, spo+-l2
lambda = -1
sigma = 0
phi2 = 0
noise = 1.5
)");
  EXPECT_TRUE(has_error(v, "lambda must be positive"));
  EXPECT_TRUE(has_error(v, "sigma must be positive"));
  EXPECT_TRUE(has_error(v, "phi2 must be positive"));
  EXPECT_TRUE(has_error(v, "noise"));
  EXPECT_TRUE(has_error(v, "at most 12 nodes"));
  EXPECT_GE(v.errors.size(), 5u);
}

TEST(Config, SyntaxErrors) {
  const auto v = parse_config("schema_version = 2\nproblem = maze\nfoo = 1\nnot a pair\nmethods = xyz\n");
  EXPECT_TRUE(has_error(v, "schema_version"));
  EXPECT_TRUE(has_error(v, "unknown problem"));
  EXPECT_TRUE(has_error(v, "foo: unknown key"));
  EXPECT_TRUE(has_error(v, "expected 'key = value'"));
  EXPECT_TRUE(has_error(v, "unknown method 'xyz'"));
  EXPECT_TRUE(has_error(parse_config("problem = tsp\n"), "schema_version: missing"));
  EXPECT_TRUE(has_error(parse_config(std::string(kMinimal) + "epochs = ten\n"), "invalid number"));
}

TEST(Config, DpoWithHammingRejected) {
  const auto v = parse_config("schema_version = 1\nproblem = knapsack\nmethods = dpo\ndownstream = hamming\n");
  EXPECT_TRUE(has_error(v, "Hamming"));
}

TEST(Config, ValidateMissingFile) {
  const auto v = validate_config("/nonexistent/experiment.cfg");
  EXPECT_FALSE(v.ok());
}

TEST(Config, FingerprintIgnoresWorkers) {
  auto a = small_config();
  auto b = a;
  b.workers = 8;
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  b.seed = 1;
  EXPECT_NE(a.fingerprint(), b.fingerprint());
}

TEST(Run, OneRowPerRepetitionAndMethod) {
  const auto cfg = small_config();
  const auto out = std::filesystem::temp_directory_path() / "dfl_harness_run";
  std::filesystem::remove_all(out);
  const auto res = run(cfg, {std::nullopt, std::nullopt, out});
  EXPECT_TRUE(res.ok());
  EXPECT_EQ(res.rows.size(), 14u);
  std::ifstream f(out / "results.csv");
  std::string line;
  std::getline(f, line);
  EXPECT_EQ(line, csv_header());
  std::size_t n = 0;
  while (std::getline(f, line)) ++n;
  EXPECT_EQ(n, 14u);
  EXPECT_TRUE(std::filesystem::exists(out / "run_info.txt"));
  std::filesystem::remove_all(out);
}

TEST(Run, RepeatableAndWorkerInvariant) {
  auto cfg = small_config();
  const auto a = run(cfg);
  const auto b = run(cfg);
  const auto c = run(cfg, {8, std::nullopt, std::nullopt});
  ASSERT_EQ(a.rows.size(), c.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(strip_timing(csv_row(a.rows[i])), strip_timing(csv_row(b.rows[i])));
    EXPECT_EQ(strip_timing(csv_row(a.rows[i])), strip_timing(csv_row(c.rows[i])));
  }
}

TEST(Run, SeedOverrideChangesData) {
  auto cfg = small_config();
  const auto a = run(cfg);
  const auto b = run(cfg, {std::nullopt, 12345, std::nullopt});
  EXPECT_NE(a.rows[0].seed, b.rows[0].seed);
}

TEST(Run, KnapsackAndTspRelaxedMethods) {
  auto k = parse_config(R"(schema_version = 1
problem = knapsack
items = 10
resources = 2
n_train = 30
n_test = 20
methods = spo+-rel, dbb-rel, pfyl-rel
epochs = 1
)");
  ASSERT_TRUE(k.ok());
  EXPECT_TRUE(run(*k.config).ok());
  auto t = parse_config(R"(schema_version = 1
problem = tsp
nodes = 5
tsp_relaxation = mtz
n_train = 20
n_test = 10
methods = spo+, spo+-rel
epochs = 1
unambiguous = true
)");
  ASSERT_TRUE(t.ok());
  const auto res = run(*t.config);
  EXPECT_TRUE(res.ok());
  EXPECT_TRUE(res.rows[0].report.normalized_unambiguous_regret.has_value());
}

TEST(Timing, ReportsEachWorkerCount) {
  auto cfg = small_config();
  cfg.methods = {*parse_method("spo+"), *parse_method("2s-lr")};
  const auto rows = timing_report(cfg, {1, 2});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].workers, 1u);
  EXPECT_EQ(rows[1].workers, 2u);
  EXPECT_EQ(rows[0].epochs, cfg.timing_epochs);
  EXPECT_GT(rows[0].mean_epoch_seconds, 0.0);
  EXPECT_NE(timing_csv(rows).find("spo+,1,"), std::string::npos);
}

TEST(Csv, ErrorRowKeepsColumnCount) {
  ResultRow r;
  r.method = "spo+";
  r.error = "bad, thing";
  const auto row = csv_row(r);
  const auto header = csv_header();
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), std::count(header.begin(), header.end(), ','));
}
