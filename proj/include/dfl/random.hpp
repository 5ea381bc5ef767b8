#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace dfl {

// Seed splitting and sampling. Every random draw in the library comes from a
// Stream whose seed is derived from (base seed, tags...) with derive_seed, so a
// draw depends only on its position in the tag tree and never on scheduling.
//
// The generator is SplitMix64 (a counter walk through the golden-ratio
// sequence followed by a bijective mixer); the transforms below are written
// out so that generated datasets are bit-identical on any platform.

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
  for (std::uint64_t t : tags) h = mix64(h ^ mix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

// Substream tags shared by the generators and the harness.
namespace stream_tag {
inline constexpr std::uint64_t features = 1;
inline constexpr std::uint64_t bmatrix = 2;
inline constexpr std::uint64_t noise = 3;
inline constexpr std::uint64_t weights = 4;
inline constexpr std::uint64_t coordinates = 5;
inline constexpr std::uint64_t repetition = 10;
inline constexpr std::uint64_t train_data = 11;
inline constexpr std::uint64_t test_data = 12;
inline constexpr std::uint64_t model_init = 13;
inline constexpr std::uint64_t shuffle = 14;
inline constexpr std::uint64_t perturbation = 15;
}  // namespace stream_tag

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n) by rejection, n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do x = next_u64();
    while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p = 0.5) { return uniform() < p; }

  // Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dfl
