#include <gtest/gtest.h>

#include <random>

#include "brute_force.hpp"
#include "dfl/knapsack.hpp"
#include "dfl/simplex.hpp"

using namespace dfl;

namespace {

Matrix rows_of(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  std::size_t r = 0;
  for (const auto& row : rows) {
    std::size_t c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

}  // namespace

TEST(Simplex, BoxMaximum) {
  LpProblem lp;
  lp.A = rows_of({{1, 0}, {0, 1}});
  lp.b = {1, 1};
  lp.c = {1, 1};
  lp.sense = ModelSense::Maximize;
  const auto r = simplex_solve(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.objective, 2.0, 1e-12);
  EXPECT_NEAR(r.x[0], 1.0, 1e-12);
  EXPECT_NEAR(r.x[1], 1.0, 1e-12);
}

TEST(Simplex, Infeasible) {
  LpProblem lp;
  lp.A = rows_of({{1}});
  lp.b = {-1};
  lp.c = {1};
  EXPECT_EQ(simplex_solve(lp).status, LpStatus::Infeasible);
}

TEST(Simplex, Unbounded) {
  LpProblem lp;
  lp.A = rows_of({{1, -1}});
  lp.b = {1};
  lp.c = {1, 1};
  lp.sense = ModelSense::Maximize;
  EXPECT_EQ(simplex_solve(lp).status, LpStatus::Unbounded);
}

TEST(Simplex, EqualityAndGreaterRows) {
  // min x + 2y  s.t. x + y = 3, x >= 1 (as a row), y >= 0.5
  LpProblem lp;
  lp.A = rows_of({{1, 1}, {1, 0}, {0, 1}});
  lp.b = {3, 1, 0.5};
  lp.c = {1, 2};
  lp.row_sense = {RowSense::Equal, RowSense::GreaterEqual, RowSense::GreaterEqual};
  const auto r = simplex_solve(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.objective, 2.5 + 1.0, 1e-9);
  EXPECT_NEAR(r.x[0], 2.5, 1e-9);
}

TEST(Simplex, FreeAndBoundedVariables) {
  // min x subject to x >= -4 via bounds, free y with y - x <= 1, y >= -10.
  LpProblem lp;
  lp.A = rows_of({{-1, 1}, {0, -1}});
  lp.b = {1, 10};
  lp.c = {1, 0};
  lp.lower = {-4, -kInf};
  lp.upper = {kInf, kInf};
  const auto r = simplex_solve(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.objective, -4.0, 1e-9);
}

TEST(Simplex, DegenerateCycleProneProblemTerminates) {
  // Beale's example cycles under textbook Dantzig pricing without a fallback.
  LpProblem lp;
  lp.A = rows_of({{0.25, -8, -1, 9}, {0.5, -12, -0.5, 3}, {0, 0, 1, 0}});
  lp.b = {0, 0, 1};
  lp.c = {-0.75, 20, -0.5, 6};
  const auto r = simplex_solve(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.objective, -1.25, 1e-9);
}

TEST(Simplex, RelaxationOfExampleModelBoundsIntegerOptimum) {
  const std::vector<std::vector<double>> W{{3, 4, 3, 6, 4}, {4, 5, 2, 3, 5}, {5, 4, 6, 2, 3}};
  const std::vector<double> b{12, 10, 15};
  const Vec c{5, 4, 3, 2, 1};
  const double ip = bf::knapsack_max(W, b, c);

  Matrix w(3, 5);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t i = 0; i < 5; ++i) w(r, i) = W[r][i];
  Knapsack ks({w, b});
  EXPECT_NEAR(ks.solve(c).objective, ip, 1e-9);

  LpProblem lp;
  lp.A = w;
  lp.b = b;
  lp.c = c;
  lp.sense = ModelSense::Maximize;
  lp.lower.assign(5, 0.0);
  lp.upper.assign(5, 1.0);
  const auto r = simplex_solve(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_GE(r.objective, ip - 1e-9);
  EXPECT_NEAR(ks.solve_relaxed(c).objective, r.objective, 1e-9);
}

TEST(Simplex, SingleConstraintMatchesGreedyFraction) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 2 + t % 9;
    Vec v(d), wt(d);
    for (std::size_t i = 0; i < d; ++i) {
      v[i] = u(gen);
      wt[i] = u(gen);
    }
    const double cap = 0.4 * std::accumulate(wt.begin(), wt.end(), 0.0);
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] / wt[a] > v[b] / wt[b]; });
    double left = cap, greedy = 0.0;
    for (auto i : order) {
      const double take = std::min(1.0, left / wt[i]);
      greedy += take * v[i];
      left -= take * wt[i];
      if (left <= 0) break;
    }
    LpProblem lp;
    lp.A = Matrix(1, d);
    for (std::size_t i = 0; i < d; ++i) lp.A(0, i) = wt[i];
    lp.b = {cap};
    lp.c = v;
    lp.sense = ModelSense::Maximize;
    lp.lower.assign(d, 0.0);
    lp.upper.assign(d, 1.0);
    const auto r = simplex_solve(lp);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_NEAR(r.objective, greedy, 1e-9 * std::max(1.0, greedy));
  }
}
