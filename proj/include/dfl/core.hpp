#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dfl {

using Vec = std::vector<double>;

// Error kinds surfaced by the library. Every failure is thrown as a
// dfl::Error so callers can switch on kind() without string matching.
enum class ErrorKind {
  InvalidCost,
  DimensionMismatch,
  Infeasible,
  UnsupportedCapability,
  SizeLimit,
  InvalidArgument,
  FingerprintMismatch,
  ChecksumMismatch,
  MalformedFile,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

enum class ModelSense { Minimize, Maximize };

inline double sense_sign(ModelSense s) { return s == ModelSense::Minimize ? 1.0 : -1.0; }

// Dense row-major matrix. Only what the library needs: shape, row views, element access.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// An optimal (or relaxed) decision together with its objective under the
// cost that produced it.
struct Solution {
  Vec values;
  double objective = 0.0;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline void require_finite(std::span<const double> cost) {
  if (!all_finite(cost)) throw Error(ErrorKind::InvalidCost, "cost vector has a non-finite entry");
}

inline void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": expected dimension " +
                                                  std::to_string(want) + ", got " +
                                                  std::to_string(got));
}

// Maps a cost in the oracle's native sense to the minimization convention
// used by every loss: identity for Minimize, negation for Maximize.
inline Vec normalize_to_min(std::span<const double> cost, ModelSense sense) {
  require_finite(cost);
  Vec out(cost.begin(), cost.end());
  if (sense == ModelSense::Maximize)
    for (double& x : out) x = -x;
  return out;
}

inline bool near_integer(double x, double tol = 1e-6) { return std::abs(x - std::round(x)) <= tol; }

// Optimality comparison tolerance: absolute 1e-9, relative for large magnitudes.
inline double opt_tol(double scale) { return 1e-9 * std::max(1.0, std::abs(scale)); }

}  // namespace dfl

namespace dfl {

// 64-bit FNV-1a, used for file checksums and spec fingerprints.
class Fnv1a {
 public:
  void update(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t digest() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

}  // namespace dfl
