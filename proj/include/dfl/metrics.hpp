#pragma once

#include <chrono>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "dfl/core.hpp"
#include "dfl/dataset.hpp"
#include "dfl/oracle.hpp"
#include "dfl/worker_pool.hpp"

namespace dfl {

template <class P>
concept CostPredictor = requires(const P& p, std::span<const double> x) {
  { p.predict(x) } -> std::convertible_to<Vec>;
};

struct EvaluationReport {
  double normalized_regret = 0.0;
  std::optional<double> normalized_unambiguous_regret;
  std::size_t unambiguous_fallbacks = 0;  // instances over the enumeration budget
  double mse = 0.0;
  std::optional<double> solution_accuracy;  // binary oracles only
  bool accuracy_rounded = false;            // fractional decisions were rounded at 0.5
  Vec regrets;                              // per instance, sense-adjusted (>= 0)
  double seconds = 0.0;

  // Flat "key = value" block.
  std::string to_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "normalized_regret = " << normalized_regret << '\n';
    if (normalized_unambiguous_regret)
      os << "normalized_unambiguous_regret = " << *normalized_unambiguous_regret << '\n'
         << "unambiguous_fallbacks = " << unambiguous_fallbacks << '\n';
    os << "mse = " << mse << '\n';
    if (solution_accuracy)
      os << "solution_accuracy = " << *solution_accuracy << '\n'
         << "accuracy_rounded = " << (accuracy_rounded ? 1 : 0) << '\n';
    os << "instances = " << regrets.size() << '\n' << "seconds = " << seconds << '\n';
    return os.str();
  }
};

// Worst regret over every optimum of the predicted problem, minimization
// convention: max_{w in W*(c-hat)} c'w - z*(c).
inline double unambiguous_regret_single(Oracle& oracle, std::span<const double> predicted,
                                        std::span<const double> cost, double true_objective,
                                        std::size_t budget = kDefaultEnumerationBudget) {
  const auto optima = argmin_set(oracle, predicted, budget);
  double worst = -kInf;
  for (const auto& w : optima) worst = std::max(worst, dot(cost, w.values));
  return worst - true_objective;
}

template <CostPredictor P>
EvaluationReport evaluate(const P& model, WorkerPool& pool, const DecisionDataset& ds,
                          bool want_unambiguous,
                          std::size_t budget = kDefaultEnumerationBudget) {
  const auto t0 = std::chrono::steady_clock::now();
  Oracle& proto = pool.replica(0);
  if (want_unambiguous && !proto.capabilities().has_optimal_set_enumeration)
    throw Error(ErrorKind::UnsupportedCapability,
                proto.fingerprint() + ": unambiguous regret needs optimal-set enumeration");
  const std::size_t n = ds.size();
  const std::size_t d = ds.cost_dim();
  const double sign = sense_sign(proto.sense());

  struct Row {
    double regret = 0.0, uregret = 0.0, sq = 0.0, acc = 0.0;
    bool fallback = false, rounded = false;
  };
  std::vector<Row> rows(n);
  const bool binary = proto.binary();
  pool.parallel_for(n, [&](Oracle& oracle, std::size_t i) {
    Row& r = rows[i];
    const Vec pred = model.predict(ds.features.row(i));
    const auto cost = ds.costs.row(i);
    const Vec pred_min = normalize_to_min(pred, oracle.sense());
    const Vec cost_min = normalize_to_min(cost, oracle.sense());
    const double z_min = sign * ds.objectives[i];
    const Solution w = argmin(oracle, pred_min);
    r.regret = dot(cost_min, w.values) - z_min;
    if (want_unambiguous) {
      try {
        r.uregret = unambiguous_regret_single(oracle, pred_min, cost_min, z_min, budget);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::SizeLimit) throw;
        r.uregret = r.regret;
        r.fallback = true;
      }
    }
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = pred[j] - cost[j];
      r.sq += diff * diff;
      double v = w.values[j];
      if (v != 0.0 && v != 1.0) {
        v = v >= 0.5 ? 1.0 : 0.0;
        r.rounded = true;
      }
      r.acc += v == ds.solutions(i, j) ? 1.0 : 0.0;
    }
    r.sq /= static_cast<double>(d);
    r.acc /= static_cast<double>(d);
  });

  EvaluationReport rep;
  double num = 0.0, unum = 0.0, den = 0.0, acc = 0.0;
  rep.regrets.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep.regrets[i] = rows[i].regret;
    num += rows[i].regret;
    unum += rows[i].uregret;
    den += std::abs(ds.objectives[i]);
    rep.mse += rows[i].sq;
    acc += rows[i].acc;
    rep.unambiguous_fallbacks += rows[i].fallback ? 1 : 0;
    rep.accuracy_rounded = rep.accuracy_rounded || rows[i].rounded;
  }
  rep.normalized_regret = num / den;
  if (want_unambiguous) rep.normalized_unambiguous_regret = unum / den;
  rep.mse /= static_cast<double>(n);
  if (binary) rep.solution_accuracy = acc / static_cast<double>(n);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace dfl
