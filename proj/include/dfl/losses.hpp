#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "dfl/core.hpp"
#include "dfl/oracle.hpp"
#include "dfl/random.hpp"

// Decision losses and differentiable-solver surrogates.
//
// Every function here works in the minimization convention: costs, true
// objectives and returned gradients are those of min_{w in S} c'w. Use
// normalize_to_min (and multiply gradients by sense_sign) at the boundary for
// maximization oracles; dfl::train does this for you.
namespace dfl::losses {

inline constexpr double kDefaultLambda = 15.0;

struct PerturbationConfig {
  std::size_t samples = 1;  // K
  double sigma = 1.0;
  // When set, the Jacobian estimate omits the 1/sigma factor, matching the
  // unscaled estimator (1/K) sum_k w_k xi_k'.
  bool unscaled_jacobian = false;

  void validate() const {
    if (samples < 1) throw Error(ErrorKind::InvalidArgument, "perturbation samples must be >= 1");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw Error(ErrorKind::InvalidArgument, "sigma must be positive");
  }
};

// What a forward pass leaves behind for its backward pass.
struct SavedForwardState {
  Vec predicted;             // c-hat
  Vec solution;              // w*(c-hat), or the perturbed mean for DPO
  std::vector<Vec> noise;    // xi_k (DPO/PFYL)
  std::vector<Vec> samples;  // w*(c-hat + sigma xi_k)
};

// ---------------------------------------------------------------- SPO+

struct SpoPlusState {
  double loss = 0.0;
  Vec true_solution;  // w*(c)
  Vec spo_solution;   // w*(2 c-hat - c)
};

// l = -min_w (2c-hat - c)'w + 2 c-hat'w*(c) - z*(c); one solve at 2c-hat - c.
inline SpoPlusState spo_plus_forward(Oracle& oracle, std::span<const double> predicted,
                                     std::span<const double> cost,
                                     std::span<const double> true_solution, double true_objective) {
  const std::size_t d = oracle.dim();
  require_dim(predicted.size(), d, "predicted cost");
  require_dim(cost.size(), d, "true cost");
  require_dim(true_solution.size(), d, "true solution");
  Vec shifted(d);
  for (std::size_t i = 0; i < d; ++i) shifted[i] = 2.0 * predicted[i] - cost[i];
  Solution w = argmin(oracle, shifted);
  SpoPlusState st;
  st.loss = -w.objective + 2.0 * dot(predicted, true_solution) - true_objective;
  st.true_solution.assign(true_solution.begin(), true_solution.end());
  st.spo_solution = std::move(w.values);
  return st;
}

inline double spo_plus_loss(Oracle& oracle, std::span<const double> predicted,
                            std::span<const double> cost, std::span<const double> true_solution,
                            double true_objective) {
  return spo_plus_forward(oracle, predicted, cost, true_solution, true_objective).loss;
}

// Subgradient 2 (w*(c) - w*(2c-hat - c)).
inline Vec spo_plus_grad(const SpoPlusState& st) {
  if (st.spo_solution.size() != st.true_solution.size() || st.spo_solution.empty())
    throw Error(ErrorKind::InvalidArgument, "SPO+ backward without a matching forward pass");
  Vec g(st.true_solution.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 2.0 * (st.true_solution[i] - st.spo_solution[i]);
  return g;
}

// ---------------------------------------------------------------- DBB

inline std::pair<Solution, SavedForwardState> dbb_forward(Oracle& oracle,
                                                          std::span<const double> predicted) {
  Solution w = argmin(oracle, predicted);
  SavedForwardState st;
  st.predicted.assign(predicted.begin(), predicted.end());
  st.solution = w.values;
  return {std::move(w), std::move(st)};
}

// Interpolated gradient (1/lambda) (w*(c-hat + lambda g) - w*(c-hat)), where g
// is dl/dw at the forward solution. One extra solve.
inline Vec dbb_backward(Oracle& oracle, const SavedForwardState& st,
                        std::span<const double> incoming_grad, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw Error(ErrorKind::InvalidArgument, "lambda must be positive");
  const std::size_t d = st.predicted.size();
  if (d == 0 || st.solution.size() != d)
    throw Error(ErrorKind::InvalidArgument, "DBB backward without a matching forward pass");
  require_dim(incoming_grad.size(), d, "incoming gradient");
  Vec shifted(d);
  for (std::size_t i = 0; i < d; ++i) shifted[i] = st.predicted[i] + lambda * incoming_grad[i];
  const Solution moved = argmin(oracle, shifted);
  Vec g(d);
  for (std::size_t i = 0; i < d; ++i) g[i] = (moved.values[i] - st.solution[i]) / lambda;
  return g;
}

// ---------------------------------------------------------------- DPO

// Monte-Carlo mean of w*(c-hat + sigma xi_k), xi_k ~ N(0, I), k = 1..K.
inline std::pair<Vec, SavedForwardState> dpo_forward(Oracle& oracle,
                                                     std::span<const double> predicted,
                                                     const PerturbationConfig& cfg, Stream& rng) {
  cfg.validate();
  const std::size_t d = oracle.dim();
  require_dim(predicted.size(), d, "predicted cost");
  SavedForwardState st;
  st.predicted.assign(predicted.begin(), predicted.end());
  Vec mean(d, 0.0);
  Vec perturbed(d);
  for (std::size_t k = 0; k < cfg.samples; ++k) {
    Vec xi(d);
    for (std::size_t i = 0; i < d; ++i) {
      xi[i] = rng.normal();
      perturbed[i] = predicted[i] + cfg.sigma * xi[i];
    }
    Solution w = argmin(oracle, perturbed);
    for (std::size_t i = 0; i < d; ++i) mean[i] += w.values[i];
    st.noise.push_back(std::move(xi));
    st.samples.push_back(std::move(w.values));
  }
  for (double& x : mean) x /= static_cast<double>(cfg.samples);
  st.solution = mean;
  return {std::move(mean), std::move(st)};
}

// g' J with J = (1 / (K sigma)) sum_k w_k xi_k'. No further solves.
inline Vec dpo_backward(const SavedForwardState& st, std::span<const double> incoming_grad,
                        const PerturbationConfig& cfg) {
  cfg.validate();
  if (st.samples.empty() || st.samples.size() != st.noise.size())
    throw Error(ErrorKind::InvalidArgument, "DPO backward without a matching forward pass");
  const std::size_t d = st.noise.front().size();
  require_dim(incoming_grad.size(), d, "incoming gradient");
  const double scale = 1.0 / (static_cast<double>(st.samples.size()) *
                              (cfg.unscaled_jacobian ? 1.0 : cfg.sigma));
  Vec g(d, 0.0);
  for (std::size_t k = 0; k < st.samples.size(); ++k) {
    const double proj = dot(incoming_grad, st.samples[k]);
    if (proj == 0.0) continue;
    for (std::size_t i = 0; i < d; ++i) g[i] += proj * st.noise[k][i];
  }
  for (double& x : g) x *= scale;
  return g;
}

// ---------------------------------------------------------------- PFYL

struct PfylResult {
  double loss = 0.0;  // up to the additive constant -Omega(w*(c))
  Vec grad;
};

// Gradient w*(c) - mean_k argmin (c-hat + sigma xi_k)'w. The reported loss
// c-hat'w*(c) - mean_k (c-hat + sigma xi_k)'w_k omits the conjugate term, which
// is constant in c-hat.
inline PfylResult pfyl_loss_and_grad(Oracle& oracle, std::span<const double> predicted,
                                     std::span<const double> true_solution,
                                     const PerturbationConfig& cfg, Stream& rng) {
  cfg.validate();
  const std::size_t d = oracle.dim();
  require_dim(predicted.size(), d, "predicted cost");
  require_dim(true_solution.size(), d, "true solution");
  PfylResult r;
  r.grad.assign(true_solution.begin(), true_solution.end());
  const double inv_k = 1.0 / static_cast<double>(cfg.samples);
  double perturbed_obj = 0.0;
  Vec perturbed(d);
  for (std::size_t k = 0; k < cfg.samples; ++k) {
    for (std::size_t i = 0; i < d; ++i) perturbed[i] = predicted[i] + cfg.sigma * rng.normal();
    const Solution w = argmin(oracle, perturbed);
    perturbed_obj += w.objective;
    for (std::size_t i = 0; i < d; ++i) r.grad[i] -= inv_k * w.values[i];
  }
  r.loss = dot(predicted, true_solution) - inv_k * perturbed_obj;
  return r;
}

// ---------------------------------------------------------------- evaluation

// c'w*(c-hat) - z*(c).
inline double regret_eval(Oracle& oracle, std::span<const double> predicted,
                          std::span<const double> cost, double true_objective) {
  require_dim(cost.size(), oracle.dim(), "true cost");
  const Solution w = argmin(oracle, predicted);
  return dot(cost, w.values) - true_objective;
}

enum class DownstreamKind { Regret, Hamming, SquaredError };

// What a downstream loss compares a decision against. Regret uses cost and
// objective; Hamming and SquaredError use solution.
struct DownstreamReference {
  Vec solution;
  Vec cost;
  double objective = 0.0;
};

struct DownstreamValue {
  double loss = 0.0;
  Vec grad;  // dl/dw
};

inline DownstreamValue downstream_loss_eval(DownstreamKind kind, std::span<const double> w,
                                            const DownstreamReference& ref) {
  DownstreamValue out;
  switch (kind) {
    case DownstreamKind::Regret:
      require_dim(ref.cost.size(), w.size(), "regret cost");
      out.loss = dot(ref.cost, w) - ref.objective;
      out.grad = ref.cost;
      break;
    case DownstreamKind::Hamming: {
      require_dim(ref.solution.size(), w.size(), "reference solution");
      out.grad.resize(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) {
        const bool binary = (w[i] == 0.0 || w[i] == 1.0) &&
                            (ref.solution[i] == 0.0 || ref.solution[i] == 1.0);
        if (!binary) throw Error(ErrorKind::InvalidArgument, "Hamming loss needs binary solutions");
        out.loss += std::abs(w[i] - ref.solution[i]);
        out.grad[i] = 1.0 - 2.0 * ref.solution[i];
      }
      break;
    }
    case DownstreamKind::SquaredError:
      require_dim(ref.solution.size(), w.size(), "reference solution");
      out.grad.resize(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double diff = w[i] - ref.solution[i];
        out.loss += diff * diff;
        out.grad[i] = 2.0 * diff;
      }
      break;
  }
  return out;
}

}  // namespace dfl::losses
