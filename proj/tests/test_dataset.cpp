#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>

#include "dfl/datagen.hpp"
#include "dfl/dataset.hpp"
#include "dfl/grid_shortest_path.hpp"
#include "dfl/knapsack.hpp"

using namespace dfl;

namespace {

DecisionDataset small_grid_dataset(std::size_t n = 250) {
  const auto data = datagen::gen_shortest_path({n, 5, 2, 0.5, 21}, {5, 5});
  return build_dataset(GridShortestPath({5, 5}), data.features, data.costs, 1, 21);
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("dfl_test_" + name);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(BuildDataset, SingleRow) {
  Matrix x(1, 1, 0.0), c(1, 4);
  const Vec cost{1, 5, 1, 5};
  std::copy(cost.begin(), cost.end(), c.row(0).begin());
  const auto ds = build_dataset(GridShortestPath({2, 2}), x, c);
  EXPECT_EQ(ds.solutions.data(), (Vec{1, 0, 1, 0}));
  EXPECT_EQ(ds.objectives, (Vec{2}));
  EXPECT_TRUE(row_consistent(ds, 0));
}

TEST(BuildDataset, RebuildIsIdenticalAcrossWorkers) {
  const auto data = datagen::gen_shortest_path({300, 5, 4, 0.5, 3}, {5, 5});
  const GridShortestPath sp({5, 5});
  const auto a = build_dataset(sp, data.features, data.costs, 1);
  const auto b = build_dataset(sp, data.features, data.costs, 4);
  EXPECT_EQ(a.solutions, b.solutions);
  EXPECT_EQ(a.objectives, b.objectives);
}

TEST(BuildDataset, ThousandGridRowsUnderTenSeconds) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ds = small_grid_dataset(1000);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(ds.size(), 1000u);
  EXPECT_LT(s, 10.0);
}

TEST(BuildDataset, ReportsFailingRow) {
  Matrix x(3, 1, 0.0), c(3, 4, 1.0);
  c(2, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    build_dataset(GridShortestPath({2, 2}), x, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidCost);
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
  }
}

TEST(Batches, SizesAndOrder) {
  const auto b = batch_indices(5, {2, false, 0});
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0], (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(b[1], (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(b[2], (std::vector<std::size_t>{4}));
}

TEST(Batches, ShuffleIsSeededPermutation) {
  const auto a = batch_indices(100, {7, true, 42});
  const auto b = batch_indices(100, {7, true, 42});
  const auto c = batch_indices(100, {7, true, 43});
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  std::vector<std::size_t> all;
  for (const auto& batch : a) all.insert(all.end(), batch.begin(), batch.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
}

TEST(Batches, CopiesRows) {
  const auto ds = small_grid_dataset(10);
  const auto batches = iterate_batches(ds, {4, true, 1});
  const auto idx = batch_indices(ds.size(), {4, true, 1});
  ASSERT_EQ(batches.size(), 3u);
  for (std::size_t r = 0; r < idx[1].size(); ++r) {
    EXPECT_EQ(batches[1].objectives[r], ds.objectives[idx[1][r]]);
    EXPECT_TRUE(std::ranges::equal(batches[1].costs.row(r), ds.costs.row(idx[1][r])));
  }
}

TEST(Persistence, RoundTripIsBitIdentical) {
  const auto ds = small_grid_dataset();
  const auto path = temp_file("roundtrip.dfld");
  save_dataset(ds, path);
  const auto back = load_dataset(path, GridShortestPath({5, 5}));
  EXPECT_EQ(back.features, ds.features);
  EXPECT_EQ(back.costs, ds.costs);
  EXPECT_EQ(back.solutions, ds.solutions);
  EXPECT_EQ(back.objectives, ds.objectives);
  EXPECT_EQ(back.fingerprint, ds.fingerprint);
  EXPECT_EQ(back.seed, ds.seed);
  std::filesystem::remove(path);
}

TEST(Persistence, WrongOracleIsFingerprintError) {
  const std::string bytes = serialize_dataset(small_grid_dataset());
  EXPECT_EQ(kind_of([&] { deserialize_dataset(bytes, GridShortestPath({4, 6})); }),
            ErrorKind::FingerprintMismatch);
  Matrix w(1, 40, 1.0);
  EXPECT_EQ(kind_of([&] { deserialize_dataset(bytes, Knapsack({w, Vec{5}})); }),
            ErrorKind::FingerprintMismatch);
}

TEST(Persistence, TruncatedFileIsMalformed) {
  const std::string bytes = serialize_dataset(small_grid_dataset());
  const GridShortestPath sp({5, 5});
  for (std::size_t keep : {std::size_t{0}, std::size_t{5}, std::size_t{12}, std::size_t{40},
                           bytes.size() / 2, bytes.size() - 1})
    EXPECT_EQ(kind_of([&] { deserialize_dataset(bytes.substr(0, keep), sp); }), ErrorKind::MalformedFile)
        << "kept " << keep << " bytes";
}

TEST(Persistence, FlippedByteIsChecksumError) {
  std::string bytes = serialize_dataset(small_grid_dataset());
  bytes[bytes.size() / 2] ^= 0x10;
  EXPECT_EQ(kind_of([&] { deserialize_dataset(bytes, GridShortestPath({5, 5})); }),
            ErrorKind::ChecksumMismatch);
}

TEST(Persistence, MissingFileIsIoError) {
  EXPECT_EQ(kind_of([&] { load_dataset("/nonexistent/dir/x.dfld", GridShortestPath({5, 5})); }),
            ErrorKind::Io);
}

TEST(Persistence, CsvExportHasHeaderAndRows) {
  const auto ds = small_grid_dataset(3);
  const auto path = temp_file("export.csv");
  export_csv(ds, path);
  std::ifstream f(path);
  std::string line;
  std::size_t lines = 0;
  std::getline(f, line);
  EXPECT_EQ(line.substr(0, 3), "x0,");
  while (std::getline(f, line)) ++lines;
  EXPECT_EQ(lines, 3u);
  std::filesystem::remove(path);
}
