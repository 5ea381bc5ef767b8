#include <gtest/gtest.h>

#include <cmath>

#include "dfl/datagen.hpp"

using namespace dfl;
using namespace dfl::datagen;

TEST(GenShortestPath, Shapes) {
  const auto d = gen_shortest_path({100, 5, 1, 0.0, 1}, {5, 5});
  EXPECT_EQ(d.features.rows(), 100u);
  EXPECT_EQ(d.features.cols(), 5u);
  EXPECT_EQ(d.costs.rows(), 100u);
  EXPECT_EQ(d.costs.cols(), 40u);
}

TEST(GenShortestPath, NoiseFreeIsDeterministic) {
  const GenSpec s{50, 5, 2, 0.0, 9};
  EXPECT_EQ(gen_shortest_path(s, {5, 5}).costs, gen_shortest_path(s, {5, 5}).costs);
  GenSpec other = s;
  other.seed = 10;
  EXPECT_NE(gen_shortest_path(s, {5, 5}).costs, gen_shortest_path(other, {5, 5}).costs);
}

TEST(GenShortestPath, ZeroFeaturesGiveConstantCost) {
  const GenSpec s{1, 5, 1, 0.0, 3};
  const Matrix x(1, 5, 0.0);
  const Matrix c = datagen::detail::polynomial_costs(s, x, 40);
  for (double v : c.data()) EXPECT_NEAR(v, 3.0 / 3.5 + 1.0, 1e-12);
}

TEST(GenShortestPath, NoiseStaysInBand) {
  const GenSpec s{1, 5, 1, 0.5, 3};
  const Matrix x(1, 5, 0.0);
  const Matrix c = datagen::detail::polynomial_costs(s, x, 40);
  for (double v : c.data()) {
    EXPECT_GE(v, 0.5 * (3.0 / 3.5 + 1.0));
    EXPECT_LE(v, 1.5 * (3.0 / 3.5 + 1.0));
  }
}

TEST(GenKnapsack, ShapesAndWeightLattice) {
  const GenSpec s{100, 5, 1, 0.0, 4};
  const auto d = gen_knapsack(s, 32, 2);
  EXPECT_EQ(d.weights.rows(), 2u);
  EXPECT_EQ(d.weights.cols(), 32u);
  EXPECT_EQ(d.costs.rows(), 100u);
  EXPECT_EQ(d.costs.cols(), 32u);
  for (double w : d.weights.data()) {
    EXPECT_GE(w, 3.0);
    EXPECT_LE(w, 8.0);
    EXPECT_NEAR(w * 10.0, std::round(w * 10.0), 1e-9);
  }
  const auto again = gen_knapsack(s, 32, 2);
  EXPECT_EQ(again.weights, d.weights);
  EXPECT_EQ(again.features, d.features);
  EXPECT_EQ(again.costs, d.costs);
}

TEST(GenTsp, Shapes) {
  const auto d = gen_tsp({100, 10, 1, 0.0, 5}, 20);
  EXPECT_EQ(d.costs.rows(), 100u);
  EXPECT_EQ(d.costs.cols(), 190u);
  EXPECT_EQ(d.features.cols(), 10u);
  EXPECT_EQ(d.coordinates.rows(), 20u);
}

TEST(GenTsp, ZeroFeaturesAddThreePerEdge) {
  const GenSpec s{1, 10, 1, 0.0, 5};
  auto d = gen_tsp(s, 6);
  // Same seed, so the same coordinates; only the features differ.
  const Matrix zero(1, 10, 0.0);
  const Matrix c = datagen::detail::tsp_costs(s, zero, d.coordinates);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = i + 1; j < 6; ++j) {
      const double dist = std::hypot(d.coordinates(i, 0) - d.coordinates(j, 0),
                                     d.coordinates(i, 1) - d.coordinates(j, 1));
      EXPECT_NEAR(c(0, tsp_edge_index(6, i, j)), dist + 3.0, 1e-12);
    }
}

TEST(GenSpec, Validation) {
  EXPECT_THROW((GenSpec{0, 5, 1, 0.0, 0}.validate()), Error);
  EXPECT_THROW((GenSpec{10, 5, 0, 0.0, 0}.validate()), Error);
  EXPECT_THROW((GenSpec{10, 5, 1, 1.0, 0}.validate()), Error);
  EXPECT_THROW(gen_knapsack({10, 5, 1, 0.0, 0}, 0, 2), Error);
}
