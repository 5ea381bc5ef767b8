#pragma once

#include <algorithm>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dfl/core.hpp"

namespace dfl {

struct OracleCapabilities {
  bool has_relaxation = false;
  bool has_optimal_set_enumeration = false;
  std::size_t decision_dim = 0;
};

// Default cap on the number of optimal solutions enumerate_optimal_set may return.
inline constexpr std::size_t kDefaultEnumerationBudget = 100000;

// Black-box optimization oracle over a fixed feasible region S:
//   solve(c) = argmin/argmax_{w in S} c'w   (per sense()).
//
// Implementations override the do_* hooks; the public wrappers validate the
// cost and recompute the objective so that every returned Solution satisfies
// objective == dot(cost, values). Instances need not be thread-safe, but must
// be cloneable so each worker can own a replica.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual ModelSense sense() const = 0;
  virtual OracleCapabilities capabilities() const = 0;
  virtual std::string fingerprint() const = 0;
  virtual std::unique_ptr<Oracle> clone() const = 0;
  // True when exact solutions are 0/1 vectors.
  virtual bool binary() const { return true; }
  virtual bool is_feasible(std::span<const double> w, double tol = 1e-6) const = 0;

  std::size_t dim() const { return capabilities().decision_dim; }

  Solution solve(std::span<const double> cost) {
    check_cost(cost);
    Solution s = do_solve(cost);
    s.objective = dot(cost, s.values);
    return s;
  }

  Solution solve_relaxed(std::span<const double> cost) {
    if (!capabilities().has_relaxation)
      throw Error(ErrorKind::UnsupportedCapability, fingerprint() + ": no relaxation available");
    check_cost(cost);
    Solution s = do_solve_relaxed(cost);
    s.objective = dot(cost, s.values);
    return s;
  }

  // Every optimal solution (objective within tolerance of the optimum). Throws
  // SizeLimit when more than `budget` optima exist or the instance is too large.
  std::vector<Solution> enumerate_optimal_set(std::span<const double> cost,
                                              std::size_t budget = kDefaultEnumerationBudget) {
    if (!capabilities().has_optimal_set_enumeration)
      throw Error(ErrorKind::UnsupportedCapability, fingerprint() + ": no optimal-set enumeration");
    check_cost(cost);
    auto all = do_enumerate(cost, budget);
    for (auto& s : all) s.objective = dot(cost, s.values);
    std::sort(all.begin(), all.end(),
              [](const Solution& a, const Solution& b) { return a.values < b.values; });
    return all;
  }

 protected:
  virtual Solution do_solve(std::span<const double> cost) = 0;
  virtual Solution do_solve_relaxed(std::span<const double>) {
    throw Error(ErrorKind::UnsupportedCapability, "relaxation not implemented");
  }
  virtual std::vector<Solution> do_enumerate(std::span<const double>, std::size_t) {
    throw Error(ErrorKind::UnsupportedCapability, "enumeration not implemented");
  }

 private:
  void check_cost(std::span<const double> cost) const {
    require_dim(cost.size(), dim(), "cost");
    require_finite(cost);
  }
};

// Solves `cost_min`, a minimization-normalized cost, on any oracle. The returned
// objective is in the minimization convention (dot(cost_min, values)).
inline Solution argmin(Oracle& oracle, std::span<const double> cost_min) {
  Solution s = oracle.solve(normalize_to_min(cost_min, oracle.sense()));
  s.objective = dot(cost_min, s.values);
  return s;
}

inline std::vector<Solution> argmin_set(Oracle& oracle, std::span<const double> cost_min,
                                        std::size_t budget = kDefaultEnumerationBudget) {
  auto all = oracle.enumerate_optimal_set(normalize_to_min(cost_min, oracle.sense()), budget);
  for (auto& s : all) s.objective = dot(cost_min, s.values);
  return all;
}

// Presents another oracle's LP relaxation as its solve(). Used to train the
// "Rel" method variants.
class RelaxedOracle final : public Oracle {
 public:
  explicit RelaxedOracle(std::unique_ptr<Oracle> inner) : inner_(std::move(inner)) {
    if (!inner_->capabilities().has_relaxation)
      throw Error(ErrorKind::UnsupportedCapability,
                  inner_->fingerprint() + ": no relaxation available");
  }

  ModelSense sense() const override { return inner_->sense(); }
  OracleCapabilities capabilities() const override {
    return {false, false, inner_->dim()};
  }
  std::string fingerprint() const override { return inner_->fingerprint() + " relaxed"; }
  std::unique_ptr<Oracle> clone() const override {
    return std::make_unique<RelaxedOracle>(inner_->clone());
  }
  bool binary() const override { return false; }
  bool is_feasible(std::span<const double> w, double tol) const override {
    for (double x : w)
      if (x < -tol || x > 1.0 + tol) return false;
    return true;
  }

 protected:
  Solution do_solve(std::span<const double> cost) override { return inner_->solve_relaxed(cost); }

 private:
  std::unique_ptr<Oracle> inner_;
};

// Oracle over an explicitly listed feasible set. Ties go to the
// lexicographically smallest point. Handy for user-defined problems and for
// small analytic test cases such as the two-point set {0, 1}.
class FiniteSetOracle final : public Oracle {
 public:
  FiniteSetOracle(std::vector<Vec> points, ModelSense sense)
      : points_(std::move(points)), sense_(sense) {
    if (points_.empty()) throw Error(ErrorKind::Infeasible, "finite set oracle: empty feasible set");
    dim_ = points_.front().size();
    for (const auto& p : points_) require_dim(p.size(), dim_, "finite set point");
    std::sort(points_.begin(), points_.end());
  }

  ModelSense sense() const override { return sense_; }
  OracleCapabilities capabilities() const override { return {false, true, dim_}; }
  std::string fingerprint() const override {
    return "finite_set d=" + std::to_string(dim_) + " n=" + std::to_string(points_.size());
  }
  std::unique_ptr<Oracle> clone() const override { return std::make_unique<FiniteSetOracle>(*this); }
  bool binary() const override {
    for (const auto& p : points_)
      for (double x : p)
        if (x != 0.0 && x != 1.0) return false;
    return true;
  }
  bool is_feasible(std::span<const double> w, double tol) const override {
    for (const auto& p : points_) {
      bool same = true;
      for (std::size_t i = 0; i < dim_ && same; ++i) same = std::abs(p[i] - w[i]) <= tol;
      if (same) return true;
    }
    return false;
  }

 protected:
  Solution do_solve(std::span<const double> cost) override {
    const double sign = sense_sign(sense_);
    std::size_t best = 0;
    double best_val = sign * dot(cost, points_[0]);
    // points_ is sorted, so keeping the first strict improvement gives the lexicographic tie-break.
    for (std::size_t i = 1; i < points_.size(); ++i) {
      const double v = sign * dot(cost, points_[i]);
      if (v < best_val) {
        best_val = v;
        best = i;
      }
    }
    return {points_[best], 0.0};
  }

  std::vector<Solution> do_enumerate(std::span<const double> cost, std::size_t budget) override {
    const double sign = sense_sign(sense_);
    double best_val = sign * dot(cost, points_[0]);
    for (const auto& p : points_) best_val = std::min(best_val, sign * dot(cost, p));
    std::vector<Solution> out;
    for (const auto& p : points_)
      if (sign * dot(cost, p) <= best_val + opt_tol(best_val)) {
        if (out.size() == budget)
          throw Error(ErrorKind::SizeLimit, "optimal set exceeds enumeration budget");
        out.push_back({p, 0.0});
      }
    return out;
  }

 private:
  std::vector<Vec> points_;
  ModelSense sense_;
  std::size_t dim_ = 0;
};

}  // namespace dfl
