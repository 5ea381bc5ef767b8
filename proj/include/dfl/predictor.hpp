#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dfl/core.hpp"
#include "dfl/random.hpp"

namespace dfl {

// c-hat = W x + b, with W of shape d x p.
struct LinearPredictor {
  Matrix weight;
  Vec bias;

  static LinearPredictor zeros(std::size_t d, std::size_t p) { return {Matrix(d, p), Vec(d, 0.0)}; }

  // Weights ~ U(-1/sqrt(p), 1/sqrt(p)), bias 0.
  static LinearPredictor init(std::size_t d, std::size_t p, std::uint64_t seed) {
    LinearPredictor m = zeros(d, p);
    Stream rng(derive_seed(seed, {stream_tag::model_init}));
    const double bound = 1.0 / std::sqrt(static_cast<double>(p));
    for (double& w : m.weight.data()) w = rng.uniform(-bound, bound);
    return m;
  }

  std::size_t input_dim() const { return weight.cols(); }
  std::size_t output_dim() const { return weight.rows(); }

  Vec predict(std::span<const double> x) const {
    require_dim(x.size(), input_dim(), "feature vector");
    Vec out(bias);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += dot(weight.row(i), x);
    return out;
  }
};

struct ParamGrad {
  Matrix weight;
  Vec bias;

  static ParamGrad zeros_like(const LinearPredictor& m) {
    return {Matrix(m.weight.rows(), m.weight.cols()), Vec(m.bias.size(), 0.0)};
  }
};

// Adds scale * (grad_c x', grad_c) into `into`.
inline void accumulate_backprop(ParamGrad& into, std::span<const double> x,
                                std::span<const double> grad_c, double scale = 1.0) {
  require_dim(grad_c.size(), into.bias.size(), "cost gradient");
  require_dim(x.size(), into.weight.cols(), "feature vector");
  for (std::size_t i = 0; i < grad_c.size(); ++i) {
    const double g = scale * grad_c[i];
    into.bias[i] += g;
    if (g == 0.0) continue;
    auto row = into.weight.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) row[j] += g * x[j];
  }
}

// dl/dW = grad_c x' (outer product), dl/db = grad_c.
inline ParamGrad backprop(const LinearPredictor& model, std::span<const double> x,
                          std::span<const double> grad_c) {
  ParamGrad g = ParamGrad::zeros_like(model);
  accumulate_backprop(g, x, grad_c);
  return g;
}

struct RegularizationConfig {
  double l1 = 0.0;  // phi_1
  double l2 = 0.0;  // phi_2

  bool active() const { return l1 > 0.0 || l2 > 0.0; }
};

struct Penalty {
  double value = 0.0;
  Vec grad;  // d/dc-hat
};

// phi1 |c-hat - c|_1 / d + phi2 |c-hat - c|_2^2 / (2d), gradient w.r.t. c-hat.
inline Penalty regularization_penalty(std::span<const double> predicted, std::span<const double> cost,
                                      const RegularizationConfig& cfg) {
  require_dim(cost.size(), predicted.size(), "regularization cost");
  const double d = static_cast<double>(predicted.size());
  Penalty p;
  p.grad.assign(predicted.size(), 0.0);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double diff = predicted[i] - cost[i];
    const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    p.value += cfg.l1 * std::abs(diff) / d + cfg.l2 * diff * diff / (2.0 * d);
    p.grad[i] = cfg.l1 * sign / d + cfg.l2 * diff / d;
  }
  return p;
}

struct SgdState {
  double learning_rate = 0.01;
  double momentum = 0.9;
  ParamGrad velocity;  // sized lazily on the first step
};

// v <- mu v + g;  theta <- theta - lr v.
inline void sgd_step(LinearPredictor& model, const ParamGrad& grads, SgdState& st) {
  require_dim(grads.bias.size(), model.bias.size(), "bias gradient");
  require_dim(grads.weight.data().size(), model.weight.data().size(), "weight gradient");
  if (st.velocity.bias.size() != model.bias.size()) st.velocity = ParamGrad::zeros_like(model);
  auto step = [&](std::vector<double>& theta, std::vector<double>& v, const std::vector<double>& g) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      v[i] = st.momentum * v[i] + g[i];
      theta[i] -= st.learning_rate * v[i];
    }
  };
  step(model.weight.data(), st.velocity.weight.data(), grads.weight.data());
  step(model.bias, st.velocity.bias, grads.bias);
}

// ---------------------------------------------------------------- two-stage baselines

// Ordinary least squares c ~ W x + b, solved by column-pivoting QR.
inline LinearPredictor fit_least_squares(const Matrix& features, const Matrix& costs) {
  require_dim(costs.rows(), features.rows(), "least-squares rows");
  const auto n = static_cast<Eigen::Index>(features.rows());
  const auto p = static_cast<Eigen::Index>(features.cols());
  const auto d = static_cast<Eigen::Index>(costs.cols());
  Eigen::MatrixXd a(n, p + 1);
  Eigen::MatrixXd y(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) a(i, j) = features(i, j);
    a(i, p) = 1.0;
    for (Eigen::Index j = 0; j < d; ++j) y(i, j) = costs(i, j);
  }
  const Eigen::MatrixXd theta = a.colPivHouseholderQr().solve(y);  // (p+1) x d
  LinearPredictor m = LinearPredictor::zeros(static_cast<std::size_t>(d), static_cast<std::size_t>(p));
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) m.weight(i, j) = theta(j, i);
    m.bias[i] = theta(p, i);
  }
  return m;
}

// k-nearest-neighbour regression: mean cost of the k closest training
// features (Euclidean; ties by training index).
class KnnPredictor {
 public:
  KnnPredictor(Matrix features, Matrix costs, std::size_t k)
      : features_(std::move(features)), costs_(std::move(costs)), k_(k) {
    if (k_ < 1 || k_ > features_.rows())
      throw Error(ErrorKind::InvalidArgument, "k must lie in [1, n_train]");
  }

  Vec predict(std::span<const double> x) const {
    require_dim(x.size(), features_.cols(), "feature vector");
    std::vector<std::pair<double, std::size_t>> dist(features_.rows());
    for (std::size_t i = 0; i < features_.rows(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double diff = features_(i, j) - x[j];
        s += diff * diff;
      }
      dist[i] = {s, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end());
    Vec out(costs_.cols(), 0.0);
    for (std::size_t r = 0; r < k_; ++r)
      for (std::size_t j = 0; j < out.size(); ++j) out[j] += costs_(dist[r].second, j);
    for (double& v : out) v /= static_cast<double>(k_);
    return out;
  }

 private:
  Matrix features_;
  Matrix costs_;
  std::size_t k_;
};

}  // namespace dfl
