#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dfl/core.hpp"
#include "dfl/oracle.hpp"

namespace dfl {

struct GridSpec {
  std::size_t height = 5;
  std::size_t width = 5;

  std::size_t nodes() const { return height * width; }
  std::size_t arc_count() const { return height * (width - 1) + (height - 1) * width; }
};

// Arcs of the h x w grid: for each row, its rightward edges, then (except on the
// last row) the downward edges leaving that row.
inline std::vector<std::pair<std::size_t, std::size_t>> grid_arcs(const GridSpec& g) {
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  arcs.reserve(g.arc_count());
  for (std::size_t i = 0; i < g.height; ++i) {
    for (std::size_t j = 0; j + 1 < g.width; ++j) {
      const std::size_t v = i * g.width + j;
      arcs.emplace_back(v, v + 1);
    }
    if (i + 1 == g.height) continue;
    for (std::size_t j = 0; j < g.width; ++j) {
      const std::size_t v = i * g.width + j;
      arcs.emplace_back(v, v + g.width);
    }
  }
  return arcs;
}

// Minimum-cost path from the north-west corner (node 0) to the south-east
// corner on a grid whose arcs point right or down.
//
// The graph is a DAG in node-index order, so the solver runs a backward
// dynamic program over cost-to-go and is exact for negative arc costs too.
// Tie-break: walking from the source, the outgoing arc with the smaller
// index wins, i.e. the optimal path whose arc-index sequence is
// lexicographically smallest.
class GridShortestPath final : public Oracle {
 public:
  explicit GridShortestPath(GridSpec spec) : spec_(spec), arcs_(grid_arcs(spec)) {
    if (spec.height < 2 || spec.width < 2)
      throw Error(ErrorKind::InvalidArgument, "grid must be at least 2x2");
    out_.resize(spec_.nodes());
    for (std::size_t e = 0; e < arcs_.size(); ++e) out_[arcs_[e].first].push_back(e);
  }

  const GridSpec& spec() const { return spec_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& arcs() const { return arcs_; }

  ModelSense sense() const override { return ModelSense::Minimize; }
  OracleCapabilities capabilities() const override { return {false, true, arcs_.size()}; }
  std::string fingerprint() const override {
    return "shortest_path h=" + std::to_string(spec_.height) + " w=" + std::to_string(spec_.width);
  }
  std::unique_ptr<Oracle> clone() const override { return std::make_unique<GridShortestPath>(*this); }

  bool is_feasible(std::span<const double> w, double tol = 1e-6) const override {
    if (w.size() != arcs_.size()) return false;
    std::vector<double> balance(spec_.nodes(), 0.0);
    for (std::size_t e = 0; e < arcs_.size(); ++e) {
      if (std::abs(w[e]) > tol && std::abs(w[e] - 1.0) > tol) return false;
      balance[arcs_[e].first] -= w[e];
      balance[arcs_[e].second] += w[e];
    }
    // A unit s-t flow on a DAG decomposes into one path (no cycles possible).
    for (std::size_t v = 0; v < spec_.nodes(); ++v) {
      const double want = v == 0 ? -1.0 : (v + 1 == spec_.nodes() ? 1.0 : 0.0);
      if (std::abs(balance[v] - want) > tol) return false;
    }
    return true;
  }

 protected:
  Solution do_solve(std::span<const double> cost) override {
    const auto togo = cost_to_go(cost);
    Vec w(arcs_.size(), 0.0);
    std::size_t v = 0;
    const std::size_t sink = spec_.nodes() - 1;
    while (v != sink) {
      std::size_t pick = out_[v].front();
      double best = cost[pick] + togo[arcs_[pick].second];
      for (std::size_t e : out_[v]) {
        const double val = cost[e] + togo[arcs_[e].second];
        if (val < best - 1e-12 * std::max(1.0, std::abs(best))) {
          best = val;
          pick = e;
        }
      }
      w[pick] = 1.0;
      v = arcs_[pick].second;
    }
    return {std::move(w), 0.0};
  }

  std::vector<Solution> do_enumerate(std::span<const double> cost, std::size_t budget) override {
    const auto togo = cost_to_go(cost);
    const double tol = opt_tol(togo[0]);
    std::vector<Solution> out;
    Vec w(arcs_.size(), 0.0);
    // Depth-first over arcs that keep the running cost within tol of the optimum.
    auto dfs = [&](auto&& self, std::size_t v, double spent) -> void {
      if (v + 1 == spec_.nodes()) {
        if (out.size() == budget)
          throw Error(ErrorKind::SizeLimit, "optimal set exceeds enumeration budget");
        out.push_back({w, 0.0});
        return;
      }
      for (std::size_t e : out_[v]) {
        const double total = spent + cost[e] + togo[arcs_[e].second];
        if (total > togo[0] + tol) continue;
        w[e] = 1.0;
        self(self, arcs_[e].second, spent + cost[e]);
        w[e] = 0.0;
      }
    };
    dfs(dfs, 0, 0.0);
    return out;
  }

 private:
  Vec cost_to_go(std::span<const double> cost) const {
    Vec togo(spec_.nodes(), kUnreached);
    togo.back() = 0.0;
    for (std::size_t v = spec_.nodes() - 1; v-- > 0;) {
      for (std::size_t e : out_[v]) togo[v] = std::min(togo[v], cost[e] + togo[arcs_[e].second]);
    }
    return togo;
  }

  static constexpr double kUnreached = 1e300;

  GridSpec spec_;
  std::vector<std::pair<std::size_t, std::size_t>> arcs_;
  std::vector<std::vector<std::size_t>> out_;
};

}  // namespace dfl
