#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numeric>
#include <string>
#include <vector>

#include "dfl/core.hpp"
#include "dfl/oracle.hpp"
#include "dfl/random.hpp"
#include "dfl/worker_pool.hpp"

namespace dfl {

// Features and true costs bound to their precomputed optimal solutions and
// objectives (in the oracle's native sense).
struct DecisionDataset {
  Matrix features;   // n x p
  Matrix costs;      // n x d
  Matrix solutions;  // n x d
  Vec objectives;    // n
  std::string fingerprint;
  std::uint64_t seed = 0;  // provenance only

  std::size_t size() const { return features.rows(); }
  std::size_t feature_dim() const { return features.cols(); }
  std::size_t cost_dim() const { return costs.cols(); }
};

inline bool row_consistent(const DecisionDataset& ds, std::size_t i) {
  const double z = dot(ds.costs.row(i), ds.solutions.row(i));
  return std::abs(z - ds.objectives[i]) <= opt_tol(z);
}

// Solves every row once. Rows fan out over the pool and land in fixed slots,
// so the result does not depend on the worker count. Any solver failure
// aborts the whole build and names the row.
inline DecisionDataset build_dataset(WorkerPool& pool, const Matrix& features, const Matrix& costs,
                                     std::uint64_t seed = 0) {
  Oracle& proto = pool.replica(0);
  require_dim(costs.cols(), proto.dim(), "dataset cost columns");
  require_dim(costs.rows(), features.rows(), "dataset rows");
  DecisionDataset ds;
  ds.features = features;
  ds.costs = costs;
  ds.solutions = Matrix(costs.rows(), costs.cols());
  ds.objectives.assign(costs.rows(), 0.0);
  ds.fingerprint = proto.fingerprint();
  ds.seed = seed;
  pool.parallel_for(costs.rows(), [&](Oracle& oracle, std::size_t i) {
    Solution s;
    try {
      s = oracle.solve(costs.row(i));
    } catch (const Error& e) {
      throw Error(e.kind(), "row " + std::to_string(i) + ": " + e.what());
    }
    std::copy(s.values.begin(), s.values.end(), ds.solutions.row(i).begin());
    ds.objectives[i] = s.objective;
  });
  return ds;
}

inline DecisionDataset build_dataset(const Oracle& oracle, const Matrix& features,
                                     const Matrix& costs, std::size_t workers = 1,
                                     std::uint64_t seed = 0) {
  WorkerPool pool(oracle, workers);
  return build_dataset(pool, features, costs, seed);
}

struct BatchIterator {
  std::size_t batch_size = 32;
  bool shuffle = true;
  std::uint64_t epoch_seed = 0;
};

// Row indices of each batch. Disjoint, covering, last batch possibly short.
inline std::vector<std::vector<std::size_t>> batch_indices(std::size_t n, const BatchIterator& it) {
  if (it.batch_size < 1) throw Error(ErrorKind::InvalidArgument, "batch size must be >= 1");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (it.shuffle) {
    Stream rng(derive_seed(it.epoch_seed, {stream_tag::shuffle}));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  }
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < n; start += it.batch_size)
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(std::min(n, start + it.batch_size)));
  return out;
}

struct Batch {
  Matrix features, costs, solutions;
  Vec objectives;
};

inline std::vector<Batch> iterate_batches(const DecisionDataset& ds, const BatchIterator& it) {
  std::vector<Batch> out;
  for (const auto& idx : batch_indices(ds.size(), it)) {
    Batch b{Matrix(idx.size(), ds.feature_dim()), Matrix(idx.size(), ds.cost_dim()),
            Matrix(idx.size(), ds.cost_dim()), Vec(idx.size())};
    for (std::size_t r = 0; r < idx.size(); ++r) {
      std::ranges::copy(ds.features.row(idx[r]), b.features.row(r).begin());
      std::ranges::copy(ds.costs.row(idx[r]), b.costs.row(r).begin());
      std::ranges::copy(ds.solutions.row(idx[r]), b.solutions.row(r).begin());
      b.objectives[r] = ds.objectives[idx[r]];
    }
    out.push_back(std::move(b));
  }
  return out;
}

// ---------------------------------------------------------------- persistence
//
// .dfld layout, all integers and doubles little-endian:
//   "DFLDS1"
//   u32 fingerprint length, fingerprint bytes (problem kind and spec)
//   u64 seed, u64 n, u64 p, u64 d
//   f64 features[n*p], costs[n*d], solutions[n*d], objectives[n]   (row-major)
//   u64 FNV-1a of every preceding byte

inline constexpr char kDatasetMagic[] = "DFLDS1";

namespace detail {

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint64_t get_u64(const std::string& in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw Error(ErrorKind::MalformedFile, "dataset file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += 8;
  return v;
}

inline void put_doubles(std::string& out, const std::vector<double>& v) {
  for (double x : v) put_u64(out, std::bit_cast<std::uint64_t>(x));
}

inline void get_doubles(const std::string& in, std::size_t& pos, std::vector<double>& v) {
  for (double& x : v) x = std::bit_cast<double>(get_u64(in, pos));
}

}  // namespace detail

inline std::string serialize_dataset(const DecisionDataset& ds) {
  std::string out(kDatasetMagic, 6);
  const auto len = static_cast<std::uint32_t>(ds.fingerprint.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((len >> (8 * i)) & 0xff));
  out += ds.fingerprint;
  detail::put_u64(out, ds.seed);
  detail::put_u64(out, ds.size());
  detail::put_u64(out, ds.feature_dim());
  detail::put_u64(out, ds.cost_dim());
  detail::put_doubles(out, ds.features.data());
  detail::put_doubles(out, ds.costs.data());
  detail::put_doubles(out, ds.solutions.data());
  detail::put_doubles(out, ds.objectives);
  Fnv1a h;
  h.update(out.data(), out.size());
  detail::put_u64(out, h.digest());
  return out;
}

inline DecisionDataset deserialize_dataset(const std::string& bytes, const Oracle& oracle) {
  using detail::get_u64;
  if (bytes.size() < 10 || bytes.compare(0, 6, kDatasetMagic) != 0)
    throw Error(ErrorKind::MalformedFile, "not a DFLDS1 dataset");
  std::size_t pos = 6;
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i)
    len |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  pos += 4;
  if (pos + len > bytes.size()) throw Error(ErrorKind::MalformedFile, "dataset file truncated");
  DecisionDataset ds;
  ds.fingerprint = bytes.substr(pos, len);
  pos += len;
  ds.seed = get_u64(bytes, pos);
  const std::uint64_t n = get_u64(bytes, pos);
  const std::uint64_t p = get_u64(bytes, pos);
  const std::uint64_t d = get_u64(bytes, pos);
  const std::uint64_t payload = n * p + 2 * n * d + n;
  if (n > (1ULL << 40) || p > (1ULL << 20) || d > (1ULL << 20) ||
      bytes.size() != pos + 8 * payload + 8)
    throw Error(ErrorKind::MalformedFile, "dataset file size does not match its header");
  Fnv1a h;
  h.update(bytes.data(), bytes.size() - 8);
  std::size_t tail = bytes.size() - 8;
  if (get_u64(bytes, tail) != h.digest())
    throw Error(ErrorKind::ChecksumMismatch, "dataset checksum mismatch");
  if (ds.fingerprint != oracle.fingerprint())
    throw Error(ErrorKind::FingerprintMismatch, "dataset was built for '" + ds.fingerprint +
                                                    "', not '" + oracle.fingerprint() + "'");
  require_dim(d, oracle.dim(), "dataset cost dimension");
  ds.features = Matrix(n, p);
  ds.costs = Matrix(n, d);
  ds.solutions = Matrix(n, d);
  ds.objectives.assign(n, 0.0);
  detail::get_doubles(bytes, pos, ds.features.data());
  detail::get_doubles(bytes, pos, ds.costs.data());
  detail::get_doubles(bytes, pos, ds.solutions.data());
  detail::get_doubles(bytes, pos, ds.objectives);
  // Spot-check 1% of rows (every 100th) for objective consistency and feasibility.
  for (std::size_t i = 0; i < n; i += 100)
    if (!row_consistent(ds, i) || !oracle.is_feasible(ds.solutions.row(i)))
      throw Error(ErrorKind::MalformedFile, "row " + std::to_string(i) + " fails the optimality record check");
  return ds;
}

inline void save_dataset(const DecisionDataset& ds, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
  const std::string bytes = serialize_dataset(ds);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorKind::Io, "write failed: " + path);
}

inline DecisionDataset load_dataset(const std::string& path, const Oracle& oracle) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return deserialize_dataset(bytes, oracle);
}

// Inspection copy: one line per sample with features, costs, solution, objective.
inline void export_csv(const DecisionDataset& ds, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
  for (std::size_t j = 0; j < ds.feature_dim(); ++j) f << "x" << j << ',';
  for (std::size_t j = 0; j < ds.cost_dim(); ++j) f << "c" << j << ',';
  for (std::size_t j = 0; j < ds.cost_dim(); ++j) f << "w" << j << ',';
  f << "z\n";
  char buf[32];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    f << buf << sep;
  };
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (double v : ds.features.row(i)) put(v, ',');
    for (double v : ds.costs.row(i)) put(v, ',');
    for (double v : ds.solutions.row(i)) put(v, ',');
    put(ds.objectives[i], '\n');
  }
}

}  // namespace dfl
