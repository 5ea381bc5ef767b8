#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "dfl/core.hpp"
#include "dfl/oracle.hpp"
#include "dfl/simplex.hpp"

namespace dfl {

struct KnapsackSpec {
  Matrix weights;  // k x d, nonnegative
  Vec capacities;  // k, positive

  std::size_t items() const { return weights.cols(); }
  std::size_t resources() const { return weights.rows(); }
};

// Multi-dimensional 0/1 knapsack: maximize value'x subject to W x <= b.
//
// Exact solve is a depth-first branch-and-bound over the positive-value items
// sorted by value per unit of aggregate weight (ties by index). Each node is
// bounded by the tightest fractional (LP) bound of the single-resource and
// aggregated-resource relaxations. Branches take the item before skipping it,
// and only strict improvements replace the incumbent, so the returned optimum
// is the first one met in that order.
class Knapsack final : public Oracle {
 public:
  explicit Knapsack(KnapsackSpec spec) : spec_(std::move(spec)) {
    if (spec_.resources() < 1 || spec_.items() < 1)
      throw Error(ErrorKind::InvalidArgument, "knapsack needs at least one item and one resource");
    require_dim(spec_.capacities.size(), spec_.resources(), "knapsack capacities");
    for (double w : spec_.weights.data())
      if (!(w >= 0.0) || !std::isfinite(w))
        throw Error(ErrorKind::InvalidArgument, "knapsack weights must be finite and nonnegative");
    for (double b : spec_.capacities)
      if (!(b > 0.0) || !std::isfinite(b))
        throw Error(ErrorKind::InvalidArgument, "knapsack capacities must be positive");
  }

  const KnapsackSpec& spec() const { return spec_; }

  ModelSense sense() const override { return ModelSense::Maximize; }
  OracleCapabilities capabilities() const override { return {true, true, spec_.items()}; }
  std::string fingerprint() const override {
    Fnv1a h;
    h.update(spec_.weights.data().data(), spec_.weights.data().size() * sizeof(double));
    h.update(spec_.capacities.data(), spec_.capacities.size() * sizeof(double));
    return "knapsack d=" + std::to_string(spec_.items()) + " k=" + std::to_string(spec_.resources()) +
           " data=" + hex64(h.digest());
  }
  std::unique_ptr<Oracle> clone() const override { return std::make_unique<Knapsack>(*this); }

  bool is_feasible(std::span<const double> x, double tol = 1e-6) const override {
    if (x.size() != spec_.items()) return false;
    for (double v : x)
      if (std::abs(v) > tol && std::abs(v - 1.0) > tol) return false;
    return within_capacity(x, tol);
  }

  bool within_capacity(std::span<const double> x, double tol = 1e-6) const {
    for (std::size_t r = 0; r < spec_.resources(); ++r)
      if (dot(spec_.weights.row(r), x) > spec_.capacities[r] + tol) return false;
    return true;
  }

  // Continuous relaxation 0 <= x <= 1 solved with the simplex engine.
  Solution lp_relax(std::span<const double> value) const {
    LpProblem lp;
    lp.A = spec_.weights;
    lp.b = spec_.capacities;
    lp.c.assign(value.begin(), value.end());
    lp.sense = ModelSense::Maximize;
    lp.lower.assign(spec_.items(), 0.0);
    lp.upper.assign(spec_.items(), 1.0);
    LpResult r = simplex_solve(lp);
    if (r.status != LpStatus::Optimal)
      throw Error(ErrorKind::Infeasible, "knapsack relaxation did not solve to optimality");
    for (double& v : r.x) v = std::clamp(v, 0.0, 1.0);
    return {std::move(r.x), 0.0};
  }

 protected:
  Solution do_solve(std::span<const double> value) override {
    Search s(spec_, value, /*min_value=*/0.0, /*exclusive=*/true);
    s.run(false, 0.0, 0);
    Vec x(spec_.items(), 0.0);
    for (std::size_t i : s.best_set) x[i] = 1.0;
    return {std::move(x), 0.0};
  }

  Solution do_solve_relaxed(std::span<const double> value) override { return lp_relax(value); }

  std::vector<Solution> do_enumerate(std::span<const double> value, std::size_t budget) override {
    double best = 0.0;
    {
      Search s(spec_, value, 0.0, true);
      s.run(false, 0.0, 0);
      best = s.best_value;
    }
    const double tol = opt_tol(best);
    Search s(spec_, value, -tol, false);
    s.best_value = best;
    s.run(true, tol, budget);
    std::vector<Solution> out;
    out.reserve(s.found.size());
    for (const auto& set : s.found) {
      Vec x(spec_.items(), 0.0);
      for (std::size_t i : set) x[i] = 1.0;
      out.push_back({std::move(x), 0.0});
    }
    return out;
  }

 private:
  struct Search {
    const KnapsackSpec& spec;
    std::span<const double> value;
    std::vector<std::size_t> order;                     // candidate items, ratio order
    std::vector<std::vector<std::size_t>> per_resource;  // positions into `order`, by ratio on r
    Vec remaining;
    std::vector<std::size_t> current;
    std::vector<std::size_t> best_set;
    double best_value = 0.0;
    std::vector<std::vector<std::size_t>> found;

    // exclusive: candidates need value > min_value; otherwise value >= min_value.
    Search(const KnapsackSpec& sp, std::span<const double> v, double min_value, bool exclusive)
        : spec(sp), value(v), remaining(sp.capacities) {
      const std::size_t k = sp.resources();
      std::vector<double> agg(sp.items(), 0.0);
      for (std::size_t i = 0; i < sp.items(); ++i) {
        const bool keep = exclusive ? v[i] > min_value : v[i] >= min_value;
        if (!keep) continue;
        bool fits = true;
        for (std::size_t r = 0; r < k; ++r) {
          agg[i] += sp.weights(r, i);
          fits = fits && sp.weights(r, i) <= sp.capacities[r];
        }
        if (fits) order.push_back(i);
      }
      auto ratio = [&](std::size_t i, double w) { return w > 0.0 ? v[i] / w : kInf; };
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ratio(a, agg[a]) > ratio(b, agg[b]);
      });
      per_resource.resize(k + 1);
      for (std::size_t r = 0; r <= k; ++r) {
        auto& idx = per_resource[r];
        idx.resize(order.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        if (r == k) continue;  // aggregated constraint already sorted
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
          return ratio(order[a], sp.weights(r, order[a])) > ratio(order[b], sp.weights(r, order[b]));
        });
      }
    }

    // Fractional bound on items at positions >= pos, one (possibly aggregated) resource.
    double resource_bound(std::size_t r, std::size_t pos) const {
      const std::size_t k = spec.resources();
      double cap = 0.0;
      if (r == k)
        for (double c : remaining) cap += c;
      else
        cap = remaining[r];
      double gain = 0.0;
      for (std::size_t q : per_resource[r]) {
        if (q < pos) continue;
        const std::size_t i = order[q];
        if (value[i] <= 0.0) continue;
        double w = 0.0;
        if (r == k)
          for (std::size_t s = 0; s < k; ++s) w += spec.weights(s, i);
        else
          w = spec.weights(r, i);
        if (w <= cap) {
          cap -= w;
          gain += value[i];
        } else {
          gain += value[i] * cap / w;
          break;
        }
      }
      return gain;
    }

    double bound(std::size_t pos) const {
      double b = kInf;
      for (std::size_t r = 0; r <= spec.resources(); ++r) b = std::min(b, resource_bound(r, pos));
      return b;
    }

    void run(bool enumerate, double tol, std::size_t budget) {
      // Every candidate has positive value, so the empty selection (value 0) always beats -1.
      if (!enumerate) best_value = -1.0;
      dfs(0, 0.0, enumerate, tol, budget);
    }

    void dfs(std::size_t pos, double acc, bool enumerate, double tol, std::size_t budget) {
      if (pos == order.size()) {
        if (enumerate) {
          if (acc >= best_value - tol) {
            if (found.size() == budget)
              throw Error(ErrorKind::SizeLimit, "optimal set exceeds enumeration budget");
            found.push_back(current);
          }
        } else if (acc > best_value + 1e-12 * std::max(1.0, std::abs(best_value))) {
          best_value = acc;
          best_set = current;
        }
        return;
      }
      const double ub = acc + bound(pos);
      if (enumerate ? ub < best_value - tol
                    : ub <= best_value + 1e-12 * std::max(1.0, std::abs(best_value)))
        return;
      const std::size_t i = order[pos];
      bool fits = true;
      for (std::size_t r = 0; r < spec.resources() && fits; ++r)
        fits = spec.weights(r, i) <= remaining[r] + 1e-12;
      if (fits) {
        for (std::size_t r = 0; r < spec.resources(); ++r) remaining[r] -= spec.weights(r, i);
        current.push_back(i);
        dfs(pos + 1, acc + value[i], enumerate, tol, budget);
        current.pop_back();
        for (std::size_t r = 0; r < spec.resources(); ++r) remaining[r] += spec.weights(r, i);
      }
      dfs(pos + 1, acc, enumerate, tol, budget);
    }
  };

  KnapsackSpec spec_;
};

}  // namespace dfl
