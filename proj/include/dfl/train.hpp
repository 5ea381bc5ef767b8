#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dfl/core.hpp"
#include "dfl/dataset.hpp"
#include "dfl/losses.hpp"
#include "dfl/metrics.hpp"
#include "dfl/predictor.hpp"
#include "dfl/random.hpp"
#include "dfl/worker_pool.hpp"

namespace dfl {

enum class TrainMethod { TwoStageMse, SpoPlus, Dbb, Dpo, Pfyl };

inline const char* to_string(TrainMethod m) {
  switch (m) {
    case TrainMethod::TwoStageMse: return "2s-mse";
    case TrainMethod::SpoPlus: return "spo+";
    case TrainMethod::Dbb: return "dbb";
    case TrainMethod::Dpo: return "dpo";
    case TrainMethod::Pfyl: return "pfyl";
  }
  return "?";
}

struct TrainConfig {
  TrainMethod method = TrainMethod::SpoPlus;
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  double learning_rate = 0.01;
  double momentum = 0.9;
  double lambda = losses::kDefaultLambda;
  losses::PerturbationConfig perturbation;
  losses::DownstreamKind downstream = losses::DownstreamKind::Regret;
  RegularizationConfig regularization;
  bool shuffle = true;
  std::uint64_t seed = 0;

  void validate() const {
    if (epochs < 1) throw Error(ErrorKind::InvalidArgument, "epochs must be >= 1");
    if (batch_size < 1) throw Error(ErrorKind::InvalidArgument, "batch size must be >= 1");
    if (!(learning_rate > 0.0)) throw Error(ErrorKind::InvalidArgument, "learning rate must be positive");
    if (!(momentum >= 0.0 && momentum < 1.0))
      throw Error(ErrorKind::InvalidArgument, "momentum must lie in [0, 1)");
    if (method == TrainMethod::Dbb && !(lambda > 0.0))
      throw Error(ErrorKind::InvalidArgument, "lambda must be positive");
    if (method == TrainMethod::Dpo || method == TrainMethod::Pfyl) perturbation.validate();
    if (method == TrainMethod::Dpo && downstream == losses::DownstreamKind::Hamming)
      throw Error(ErrorKind::InvalidArgument, "Hamming loss needs binary decisions; DPO yields fractional ones");
    if (regularization.l1 < 0.0 || regularization.l2 < 0.0)
      throw Error(ErrorKind::InvalidArgument, "regularization weights must be nonnegative");
  }
};

struct EpochRecord {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double seconds = 0.0;
  std::optional<double> validation_regret;
};

struct TrainResult {
  LinearPredictor model;
  std::vector<EpochRecord> trace;
  std::optional<std::size_t> best_epoch;  // by validation regret, when tracked
  std::optional<LinearPredictor> best_model;
};

// Optional validation hook: a dataset and a pool over the exact oracle.
struct Validation {
  const DecisionDataset* data = nullptr;
  WorkerPool* pool = nullptr;
};

// Loss value and c-hat gradient (native sense) for one training row.
struct SampleStep {
  double loss = 0.0;
  Vec grad;
};

inline SampleStep sample_step(Oracle& oracle, const TrainConfig& cfg, std::span<const double> pred,
                              std::span<const double> cost, std::span<const double> w_true,
                              double z_true, Stream& rng) {
  SampleStep out;
  const double s = sense_sign(oracle.sense());
  const std::size_t d = pred.size();
  if (cfg.method == TrainMethod::TwoStageMse) {
    out.grad.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      const double diff = pred[i] - cost[i];
      out.loss += diff * diff / static_cast<double>(d);
      out.grad[i] = 2.0 * diff / static_cast<double>(d);
    }
  } else {
    const Vec pred_min = normalize_to_min(pred, oracle.sense());
    const Vec cost_min = normalize_to_min(cost, oracle.sense());
    const double z_min = s * z_true;
    const losses::DownstreamReference ref{Vec(w_true.begin(), w_true.end()), cost_min, z_min};
    switch (cfg.method) {
      case TrainMethod::SpoPlus: {
        const auto st = losses::spo_plus_forward(oracle, pred_min, cost_min, w_true, z_min);
        out.loss = st.loss;
        out.grad = losses::spo_plus_grad(st);
        break;
      }
      case TrainMethod::Dbb: {
        auto [w, st] = losses::dbb_forward(oracle, pred_min);
        const auto dl = losses::downstream_loss_eval(cfg.downstream, w.values, ref);
        out.loss = dl.loss;
        out.grad = losses::dbb_backward(oracle, st, dl.grad, cfg.lambda);
        break;
      }
      case TrainMethod::Dpo: {
        auto [mean, st] = losses::dpo_forward(oracle, pred_min, cfg.perturbation, rng);
        const auto dl = losses::downstream_loss_eval(cfg.downstream, mean, ref);
        out.loss = dl.loss;
        out.grad = losses::dpo_backward(st, dl.grad, cfg.perturbation);
        break;
      }
      case TrainMethod::Pfyl: {
        auto r = losses::pfyl_loss_and_grad(oracle, pred_min, w_true, cfg.perturbation, rng);
        out.loss = r.loss;
        out.grad = std::move(r.grad);
        break;
      }
      case TrainMethod::TwoStageMse: break;
    }
    for (double& g : out.grad) g *= s;
  }
  if (cfg.regularization.active()) {
    const Penalty p = regularization_penalty(pred, cost, cfg.regularization);
    out.loss += p.value;
    for (std::size_t i = 0; i < d; ++i) out.grad[i] += p.grad[i];
  }
  return out;
}

// Mini-batch gradient descent through the solver: per batch, predict, run
// the method's forward/backward per row on the pool, average, backprop and
// take one SGD step. `pool` solves with whatever oracle training should use
// (exact or relaxed). Per-row noise streams are keyed by (seed, epoch, row),
// so results do not depend on the worker count.
inline TrainResult train(LinearPredictor model, const DecisionDataset& ds, const TrainConfig& cfg,
                         WorkerPool& pool, Validation validation = {}) {
  cfg.validate();
  require_dim(model.output_dim(), ds.cost_dim(), "predictor output");
  require_dim(model.input_dim(), ds.feature_dim(), "predictor input");
  require_dim(pool.replica(0).dim(), ds.cost_dim(), "training oracle");

  TrainResult result;
  SgdState sgd{cfg.learning_rate, cfg.momentum, ParamGrad::zeros_like(model)};
  std::optional<double> best_val;
  std::vector<SampleStep> steps;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const BatchIterator it{cfg.batch_size, cfg.shuffle, derive_seed(cfg.seed, {stream_tag::shuffle, epoch})};
    double loss_sum = 0.0;
    for (const auto& batch : batch_indices(ds.size(), it)) {
      steps.assign(batch.size(), {});
      pool.parallel_for(batch.size(), [&](Oracle& oracle, std::size_t r) {
        const std::size_t i = batch[r];
        Stream rng(derive_seed(cfg.seed, {stream_tag::perturbation, epoch, i}));
        const Vec pred = model.predict(ds.features.row(i));
        steps[r] = sample_step(oracle, cfg, pred, ds.costs.row(i), ds.solutions.row(i),
                               ds.objectives[i], rng);
      });
      ParamGrad grad = ParamGrad::zeros_like(model);
      const double inv_b = 1.0 / static_cast<double>(batch.size());
      for (std::size_t r = 0; r < batch.size(); ++r) {
        loss_sum += steps[r].loss;
        accumulate_backprop(grad, ds.features.row(batch[r]), steps[r].grad, inv_b);
      }
      sgd_step(model, grad, sgd);
    }
    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.mean_loss = loss_sum / static_cast<double>(ds.size());
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (validation.data && validation.pool) {
      rec.validation_regret = evaluate(model, *validation.pool, *validation.data, false).normalized_regret;
      if (!best_val || *rec.validation_regret < *best_val) {
        best_val = rec.validation_regret;
        result.best_epoch = rec.epoch;
        result.best_model = model;
      }
    }
    result.trace.push_back(rec);
  }
  result.model = std::move(model);
  return result;
}

}  // namespace dfl
