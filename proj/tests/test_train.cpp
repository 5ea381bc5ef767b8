#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dfl/datagen.hpp"
#include "dfl/grid_shortest_path.hpp"
#include "dfl/knapsack.hpp"
#include "dfl/predictor.hpp"
#include "dfl/train.hpp"

using namespace dfl;

TEST(LinearPredictor, Examples) {
  const auto zero = LinearPredictor::zeros(3, 2);
  EXPECT_EQ(zero.predict(Vec{4, 5}), (Vec{0, 0, 0}));

  auto id = LinearPredictor::zeros(2, 2);
  id.weight(0, 0) = id.weight(1, 1) = 1.0;
  EXPECT_EQ(id.predict(Vec{1, 2}), (Vec{1, 2}));
}

TEST(LinearPredictor, MatchesNaiveProduct) {
  const auto m = LinearPredictor::init(7, 4, 3);
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n(0.0, 1.0);
  Vec x(4);
  for (double& v : x) v = n(gen);
  const Vec out = m.predict(x);
  for (std::size_t i = 0; i < 7; ++i) {
    double want = m.bias[i];
    for (std::size_t j = 0; j < 4; ++j) want += m.weight(i, j) * x[j];
    EXPECT_NEAR(out[i], want, 1e-12);
  }
}

TEST(Backprop, Examples) {
  const auto m = LinearPredictor::zeros(1, 1);
  const auto g = backprop(m, Vec{2}, Vec{3});
  EXPECT_EQ(g.weight(0, 0), 6.0);
  EXPECT_EQ(g.bias[0], 3.0);
  const auto z = backprop(LinearPredictor::zeros(2, 3), Vec{1, 2, 3}, Vec{0, 0});
  for (double v : z.weight.data()) EXPECT_EQ(v, 0.0);
  for (double v : z.bias) EXPECT_EQ(v, 0.0);
}

TEST(Backprop, MatchesFiniteDifferences) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    auto m = LinearPredictor::init(3, 4, t);
    Vec x(4), a(3);
    for (double& v : x) v = n(gen);
    for (double& v : a) v = n(gen);
    // l(c) = sum_i a_i sin(c_i) + c_i^2 / 2
    auto loss = [&](const LinearPredictor& mm) {
      const Vec c = mm.predict(x);
      double s = 0;
      for (std::size_t i = 0; i < 3; ++i) s += a[i] * std::sin(c[i]) + 0.5 * c[i] * c[i];
      return s;
    };
    const Vec c = m.predict(x);
    Vec gc(3);
    for (std::size_t i = 0; i < 3; ++i) gc[i] = a[i] * std::cos(c[i]) + c[i];
    const auto g = backprop(m, x, gc);
    const double h = 1e-6;
    for (std::size_t k = 0; k < m.weight.data().size(); ++k) {
      auto up = m, dn = m;
      up.weight.data()[k] += h;
      dn.weight.data()[k] -= h;
      const double fd = (loss(up) - loss(dn)) / (2 * h);
      EXPECT_NEAR(g.weight.data()[k], fd, 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(Regularization, Examples) {
  const auto zero = regularization_penalty(Vec{1, 2}, Vec{1, 2}, {1.0, 1.0});
  EXPECT_EQ(zero.value, 0.0);
  EXPECT_EQ(zero.grad, (Vec{0, 0}));

  const auto l1 = regularization_penalty(Vec{2, -2}, Vec{0, 0}, {1.0, 0.0});
  EXPECT_DOUBLE_EQ(l1.value, 2.0);
  EXPECT_EQ(l1.grad, (Vec{0.5, -0.5}));

  const auto l2 = regularization_penalty(Vec{2, 0}, Vec{0, 0}, {0.0, 1.0});
  EXPECT_DOUBLE_EQ(l2.value, 1.0);
  EXPECT_EQ(l2.grad, (Vec{1, 0}));
}

TEST(Sgd, Examples) {
  auto m = LinearPredictor::init(2, 2, 1);
  const auto before = m;
  SgdState st{0.1, 0.9, {}};
  sgd_step(m, ParamGrad::zeros_like(m), st);
  EXPECT_EQ(m.weight, before.weight);
  EXPECT_EQ(m.bias, before.bias);

  SgdState plain{0.1, 0.0, {}};
  auto g = ParamGrad::zeros_like(m);
  g.weight(0, 1) = 2.0;
  g.bias[1] = -1.0;
  sgd_step(m, g, plain);
  EXPECT_DOUBLE_EQ(m.weight(0, 1), before.weight(0, 1) - 0.2);
  EXPECT_DOUBLE_EQ(m.bias[1], 0.1);
  sgd_step(m, g, plain);
  EXPECT_DOUBLE_EQ(m.bias[1], 0.2);
}

TEST(Sgd, MomentumAccumulates) {
  auto m = LinearPredictor::zeros(1, 1);
  SgdState st{1.0, 0.5, {}};
  auto g = ParamGrad::zeros_like(m);
  g.bias[0] = 1.0;
  sgd_step(m, g, st);
  sgd_step(m, g, st);
  EXPECT_DOUBLE_EQ(m.bias[0], -(1.0 + 1.5));
}

TEST(LeastSquares, RecoversLinearMap) {
  std::mt19937_64 gen(6);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix x(50, 3), c(50, 2);
  for (std::size_t i = 0; i < 50; ++i) {
    for (std::size_t j = 0; j < 3; ++j) x(i, j) = n(gen);
    c(i, 0) = 2 * x(i, 0) - x(i, 2) + 1;
    c(i, 1) = 0.5 * x(i, 1) - 3;
  }
  const auto m = fit_least_squares(x, c);
  EXPECT_NEAR(m.weight(0, 0), 2.0, 1e-10);
  EXPECT_NEAR(m.weight(0, 2), -1.0, 1e-10);
  EXPECT_NEAR(m.bias[0], 1.0, 1e-10);
  EXPECT_NEAR(m.weight(1, 1), 0.5, 1e-10);
  EXPECT_NEAR(m.bias[1], -3.0, 1e-10);
}

TEST(Knn, AveragesNearest) {
  Matrix x(4, 1), c(4, 1);
  for (std::size_t i = 0; i < 4; ++i) {
    x(i, 0) = static_cast<double>(i);
    c(i, 0) = static_cast<double>(10 * i);
  }
  const KnnPredictor knn(x, c, 2);
  EXPECT_DOUBLE_EQ(knn.predict(Vec{0.1})[0], 5.0);
  EXPECT_DOUBLE_EQ(knn.predict(Vec{2.9})[0], 25.0);
  EXPECT_THROW(KnnPredictor(x, c, 5), Error);
}

namespace {

struct Fixture {
  GridShortestPath oracle{{3, 3}};
  DecisionDataset ds;

  Fixture() {
    const auto data = datagen::gen_shortest_path({200, 5, 4, 0.5, 12}, {3, 3});
    ds = build_dataset(oracle, data.features, data.costs);
  }
};

TrainResult fit(const Fixture& f, TrainMethod method, std::size_t workers, std::uint64_t seed = 5) {
  TrainConfig cfg;
  cfg.method = method;
  cfg.epochs = 3;
  cfg.seed = seed;
  cfg.perturbation = {2, 1.0};
  WorkerPool pool(f.oracle, workers);
  return train(LinearPredictor::init(f.ds.cost_dim(), f.ds.feature_dim(), 1), f.ds, cfg, pool);
}

}  // namespace

TEST(Train, IdenticalAcrossWorkerCounts) {
  const Fixture f;
  for (auto m : {TrainMethod::TwoStageMse, TrainMethod::SpoPlus, TrainMethod::Dbb, TrainMethod::Dpo,
                 TrainMethod::Pfyl}) {
    const auto a = fit(f, m, 1);
    const auto b = fit(f, m, 4);
    EXPECT_EQ(a.model.weight, b.model.weight) << to_string(m);
    EXPECT_EQ(a.model.bias, b.model.bias) << to_string(m);
    ASSERT_EQ(a.trace.size(), 3u);
    for (std::size_t e = 0; e < 3; ++e) EXPECT_EQ(a.trace[e].mean_loss, b.trace[e].mean_loss);
  }
}

TEST(Train, SeedChangesPerturbedRuns) {
  const Fixture f;
  EXPECT_NE(fit(f, TrainMethod::Pfyl, 1, 5).model.weight, fit(f, TrainMethod::Pfyl, 1, 6).model.weight);
}

TEST(Train, SpoPlusReducesTrainingLoss) {
  const Fixture f;
  TrainConfig cfg;
  cfg.method = TrainMethod::SpoPlus;
  cfg.epochs = 15;
  WorkerPool pool(f.oracle, 1);
  const auto r = train(LinearPredictor::init(f.ds.cost_dim(), f.ds.feature_dim(), 1), f.ds, cfg, pool);
  EXPECT_LT(r.trace.back().mean_loss, r.trace.front().mean_loss);
}

TEST(Train, ValidationTracksBestEpoch) {
  const Fixture f;
  TrainConfig cfg;
  cfg.method = TrainMethod::SpoPlus;
  cfg.epochs = 4;
  WorkerPool pool(f.oracle, 1), vpool(f.oracle, 1);
  const auto r = train(LinearPredictor::init(f.ds.cost_dim(), f.ds.feature_dim(), 1), f.ds, cfg, pool,
                       {&f.ds, &vpool});
  ASSERT_TRUE(r.best_model.has_value());
  EXPECT_GE(r.best_epoch, 1u);
  for (const auto& e : r.trace) EXPECT_TRUE(e.validation_regret.has_value());
}

TEST(Train, MaximizationProblemTrains) {
  const auto data = datagen::gen_knapsack({100, 5, 2, 0.0, 3}, 8, 2);
  Knapsack ks({data.weights, Vec(2, 10.0)});
  const auto ds = build_dataset(ks, data.features, data.costs);
  for (auto m : {TrainMethod::SpoPlus, TrainMethod::Dbb, TrainMethod::Pfyl, TrainMethod::Dpo}) {
    TrainConfig cfg;
    cfg.method = m;
    cfg.epochs = 2;
    WorkerPool pool(ks, 1);
    const auto r = train(LinearPredictor::init(ds.cost_dim(), ds.feature_dim(), 1), ds, cfg, pool);
    EXPECT_TRUE(all_finite(r.model.bias)) << to_string(m);
  }
}

TEST(Train, RegularizedStepAddsPenalty) {
  GridShortestPath sp({2, 2});
  TrainConfig cfg;
  cfg.method = TrainMethod::SpoPlus;
  cfg.regularization = {0.0, 1.0};
  Stream rng(1);
  const Vec c{1, 5, 1, 5};
  const auto plain = sample_step(sp, TrainConfig{}, c, c, Vec{1, 0, 1, 0}, 2.0, rng);
  Vec pred{2, 5, 1, 5};
  const auto reg = sample_step(sp, cfg, pred, c, Vec{1, 0, 1, 0}, 2.0, rng);
  EXPECT_EQ(plain.loss, 0.0);
  EXPECT_DOUBLE_EQ(reg.grad[0], 0.25);
}

TEST(TrainConfig, Validation) {
  TrainConfig cfg;
  cfg.epochs = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.lambda = 0.0;
  cfg.method = TrainMethod::Dbb;
  EXPECT_THROW(cfg.validate(), Error);
}
