#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

#include "dfl/core.hpp"
#include "dfl/grid_shortest_path.hpp"
#include "dfl/random.hpp"
#include "dfl/tsp.hpp"

// Synthetic benchmark generators. Features x_i ~ N(0, I_p); costs are a
// degree-`deg` polynomial of B x_i with multiplicative noise U(1-e, 1+e).
//
// Randomness layout: seed -> independent substreams (stream_tag::features,
// bmatrix, noise, weights, coordinates). Features and noise are consumed row
// by row, so the first n rows of a larger draw equal a draw of size n, and the
// B matrix, weights and coordinates do not depend on n at all.
namespace dfl::datagen {

struct GenSpec {
  std::size_t n = 1000;
  std::size_t p = 5;
  int deg = 1;
  double noise_half_width = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 1 || p < 1) throw Error(ErrorKind::InvalidArgument, "n and p must be >= 1");
    if (deg < 1) throw Error(ErrorKind::InvalidArgument, "deg must be >= 1");
    if (!(noise_half_width >= 0.0 && noise_half_width < 1.0))
      throw Error(ErrorKind::InvalidArgument, "noise half-width must lie in [0, 1)");
  }
};

struct GeneratedData {
  Matrix features;     // n x p
  Matrix costs;        // n x d
  Matrix weights;      // k x d, knapsack only
  Matrix coordinates;  // v x 2, TSP only
};

namespace detail {

inline Matrix draw_features(const GenSpec& s) {
  Stream rng(derive_seed(s.seed, {stream_tag::features}));
  Matrix x(s.n, s.p);
  for (double& v : x.data()) v = rng.normal();
  return x;
}

inline Matrix draw_bernoulli(const GenSpec& s, std::size_t d) {
  Stream rng(derive_seed(s.seed, {stream_tag::bmatrix}));
  Matrix b(d, s.p);
  for (double& v : b.data()) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
  return b;
}

inline Matrix draw_noise(const GenSpec& s, std::size_t d) {
  Stream rng(derive_seed(s.seed, {stream_tag::noise}));
  Matrix eps(s.n, d);
  const double e = s.noise_half_width;
  for (double& v : eps.data()) v = 1.0 - e + 2.0 * e * rng.uniform();
  return eps;
}

// (1/sqrt(p)) (B x_i)_j + 3
inline double kernel_base(const Matrix& b, std::span<const double> x, std::size_t j) {
  return dot(b.row(j), x) / std::sqrt(static_cast<double>(x.size())) + 3.0;
}

// Shared by the shortest-path and knapsack generators:
// c_ij = [ (1/3.5^deg) (kernel)^deg + 1 ] * eps_ij, noise on the whole bracket.
inline Matrix polynomial_costs(const GenSpec& s, const Matrix& x, std::size_t d) {
  const Matrix b = draw_bernoulli(s, d);
  const Matrix eps = draw_noise(s, d);
  Matrix c(s.n, d);
  const double scale = std::pow(3.5, s.deg);
  for (std::size_t i = 0; i < s.n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      c(i, j) = (std::pow(kernel_base(b, x.row(i), j), s.deg) / scale + 1.0) * eps(i, j);
  return c;
}

// Edge costs of the TSP generator for given features and node coordinates.
inline Matrix tsp_costs(const GenSpec& s, const Matrix& x, const Matrix& coordinates) {
  const std::size_t nodes = coordinates.rows();
  const std::size_t d = nodes * (nodes - 1) / 2;
  Stream b_rng(derive_seed(s.seed, {stream_tag::bmatrix}));
  Matrix b(d, s.p);
  for (double& v : b.data()) {
    const double mask = b_rng.bernoulli(0.5) ? 1.0 : 0.0;
    v = mask * b_rng.uniform(-2.0, 2.0);
  }
  const Matrix eps = draw_noise(s, d);

  Vec dist(d);
  for (std::size_t i = 0; i < nodes; ++i)
    for (std::size_t j = i + 1; j < nodes; ++j)
      dist[tsp_edge_index(nodes, i, j)] =
          std::hypot(coordinates(i, 0) - coordinates(j, 0), coordinates(i, 1) - coordinates(j, 1));
  const double scale = std::pow(3.0, s.deg - 1);
  Matrix c(s.n, d);
  for (std::size_t i = 0; i < s.n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      c(i, j) = dist[j] + std::pow(kernel_base(b, x.row(i), j), s.deg) / scale * eps(i, j);
  return c;
}

}  // namespace detail

inline GeneratedData gen_shortest_path(const GenSpec& s, const GridSpec& grid) {
  s.validate();
  if (grid.height < 2 || grid.width < 2)
    throw Error(ErrorKind::InvalidArgument, "grid must be at least 2x2");
  GeneratedData out;
  out.features = detail::draw_features(s);
  out.costs = detail::polynomial_costs(s, out.features, grid.arc_count());
  return out;
}

// Weights are drawn uniformly from the 51-point lattice {3.0, 3.1, ..., 8.0}.
inline GeneratedData gen_knapsack(const GenSpec& s, std::size_t items, std::size_t resources) {
  s.validate();
  if (items < 1 || resources < 1)
    throw Error(ErrorKind::InvalidArgument, "knapsack needs items >= 1 and resources >= 1");
  GeneratedData out;
  Stream rng(derive_seed(s.seed, {stream_tag::weights}));
  out.weights = Matrix(resources, items);
  for (double& w : out.weights.data()) w = static_cast<double>(30 + rng.below(51)) / 10.0;
  out.features = detail::draw_features(s);
  out.costs = detail::polynomial_costs(s, out.features, items);
  return out;
}

// Edge cost = Euclidean distance + (1/3^(deg-1)) (kernel)^deg * eps, where B
// has entries Bernoulli(0.5) * U(-2, 2) and each node's coordinates come from
// N(0, I) or U(-2, 2)^2 by a fair per-node coin.
inline GeneratedData gen_tsp(const GenSpec& s, std::size_t nodes) {
  s.validate();
  if (nodes < 3) throw Error(ErrorKind::InvalidArgument, "TSP needs at least 3 nodes");
  GeneratedData out;
  out.features = detail::draw_features(s);

  Stream coord_rng(derive_seed(s.seed, {stream_tag::coordinates}));
  out.coordinates = Matrix(nodes, 2);
  for (std::size_t v = 0; v < nodes; ++v) {
    const bool gaussian = coord_rng.bernoulli(0.5);
    for (std::size_t a = 0; a < 2; ++a)
      out.coordinates(v, a) = gaussian ? coord_rng.normal() : coord_rng.uniform(-2.0, 2.0);
  }

  out.costs = detail::tsp_costs(s, out.features, out.coordinates);
  return out;
}

}  // namespace dfl::datagen
