#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "dfl/core.hpp"
#include "dfl/oracle.hpp"
#include "dfl/simplex.hpp"

namespace dfl {

enum class TspFormulation { MTZ, GG };

struct TspSpec {
  std::size_t nodes = 10;
  TspFormulation relaxation = TspFormulation::GG;

  std::size_t edge_count() const { return nodes * (nodes - 1) / 2; }
};

inline constexpr std::size_t kHeldKarpMaxNodes = 18;
inline constexpr std::size_t kTspLpMaxNodes = 12;

// Position of undirected edge {i, j} in the lexicographic order of pairs i < j.
inline std::size_t tsp_edge_index(std::size_t v, std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  return i * v - i * (i + 1) / 2 + (j - i - 1);
}

inline Vec tour_to_edges(std::size_t v, const std::vector<std::size_t>& tour) {
  Vec w(v * (v - 1) / 2, 0.0);
  for (std::size_t t = 0; t < tour.size(); ++t)
    w[tsp_edge_index(v, tour[t], tour[(t + 1) % tour.size()])] = 1.0;
  return w;
}

struct TspRelaxation {
  Solution projected;       // undirected edge values, objective = cost'values
  double lp_objective = 0;  // value of the directed LP, a lower bound on the tour length
  std::size_t iterations = 0;
};

// LP relaxation of the directed MTZ or GG formulation with node 0 as depot.
// Directed arc values are projected onto undirected edges by summing both
// directions and clamping to [0, 1].
inline TspRelaxation tsp_lp_relax(std::size_t v, std::span<const double> cost, TspFormulation f) {
  if (v < 3) throw Error(ErrorKind::InvalidArgument, "TSP needs at least 3 nodes");
  if (v > kTspLpMaxNodes)
    throw Error(ErrorKind::SizeLimit, "TSP LP relaxation supports at most " +
                                          std::to_string(kTspLpMaxNodes) + " nodes");
  require_dim(cost.size(), v * (v - 1) / 2, "TSP cost");
  require_finite(cost);

  const std::size_t arcs = v * (v - 1);
  auto arc = [v](std::size_t i, std::size_t j) { return i * (v - 1) + (j < i ? j : j - 1); };
  const std::size_t extra = f == TspFormulation::MTZ ? v - 1 : arcs;
  const std::size_t nvar = arcs + extra;

  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::vector<RowSense> sense;
  Vec rhs;
  auto add_row = [&](std::vector<std::pair<std::size_t, double>> r, RowSense s, double b) {
    rows.push_back(std::move(r));
    sense.push_back(s);
    rhs.push_back(b);
  };
  for (std::size_t i = 0; i < v; ++i) {
    std::vector<std::pair<std::size_t, double>> out, in;
    for (std::size_t j = 0; j < v; ++j) {
      if (i == j) continue;
      out.emplace_back(arc(i, j), 1.0);
      in.emplace_back(arc(j, i), 1.0);
    }
    add_row(std::move(out), RowSense::Equal, 1.0);
    add_row(std::move(in), RowSense::Equal, 1.0);
  }

  LpProblem lp;
  lp.lower.assign(nvar, 0.0);
  lp.upper.assign(nvar, 1.0);
  if (f == TspFormulation::MTZ) {
    // u_i - u_j + (v-1) x_ij <= v-2 for depot-free arcs; 1 <= u_i <= v-1.
    auto u = [&](std::size_t i) { return arcs + i - 1; };
    for (std::size_t i = 1; i < v; ++i) {
      lp.lower[u(i)] = 1.0;
      lp.upper[u(i)] = static_cast<double>(v - 1);
      for (std::size_t j = 1; j < v; ++j) {
        if (i == j) continue;
        add_row({{u(i), 1.0}, {u(j), -1.0}, {arc(i, j), static_cast<double>(v - 1)}},
                RowSense::LessEqual, static_cast<double>(v - 2));
      }
    }
  } else {
    // Single-commodity flow: each non-depot node absorbs one unit; y_ij <= (v-1) x_ij.
    auto y = [&](std::size_t i, std::size_t j) { return arcs + arc(i, j); };
    for (std::size_t i = 1; i < v; ++i) {
      std::vector<std::pair<std::size_t, double>> r;
      for (std::size_t j = 0; j < v; ++j) {
        if (i == j) continue;
        r.emplace_back(y(j, i), 1.0);
        r.emplace_back(y(i, j), -1.0);
      }
      add_row(std::move(r), RowSense::Equal, 1.0);
    }
    for (std::size_t i = 0; i < v; ++i)
      for (std::size_t j = 0; j < v; ++j) {
        if (i == j) continue;
        lp.upper[y(i, j)] = kInf;
        add_row({{y(i, j), 1.0}, {arc(i, j), -static_cast<double>(v - 1)}}, RowSense::LessEqual, 0.0);
      }
  }

  lp.A = Matrix(rows.size(), nvar);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (auto [j, a] : rows[r]) lp.A(r, j) = a;
  lp.b = std::move(rhs);
  lp.row_sense = std::move(sense);
  lp.c.assign(nvar, 0.0);
  for (std::size_t i = 0; i < v; ++i)
    for (std::size_t j = 0; j < v; ++j)
      if (i != j) lp.c[arc(i, j)] = cost[tsp_edge_index(v, i, j)];

  LpResult res = simplex_solve(lp);
  if (res.status != LpStatus::Optimal)
    throw Error(ErrorKind::Infeasible, "TSP relaxation did not solve to optimality");

  TspRelaxation out;
  out.lp_objective = res.objective;
  out.iterations = res.iterations;
  out.projected.values.assign(v * (v - 1) / 2, 0.0);
  for (std::size_t i = 0; i < v; ++i)
    for (std::size_t j = i + 1; j < v; ++j)
      out.projected.values[tsp_edge_index(v, i, j)] =
          std::clamp(res.x[arc(i, j)] + res.x[arc(j, i)], 0.0, 1.0);
  out.projected.objective = dot(cost, out.projected.values);
  return out;
}

// Symmetric TSP over v nodes with edge costs indexed by tsp_edge_index.
//
// Exact solves use Held-Karp dynamic programming (tours start at node 0),
// which yields the same optimum as the DFJ integer program. Ties: the last
// node before returning to 0 is the smallest index among optimal choices, and
// likewise for each predecessor while backtracking.
class Tsp final : public Oracle {
 public:
  explicit Tsp(TspSpec spec) : spec_(spec) {
    if (spec_.nodes < 3) throw Error(ErrorKind::InvalidArgument, "TSP needs at least 3 nodes");
    if (spec_.nodes > kHeldKarpMaxNodes)
      throw Error(ErrorKind::SizeLimit, "exact TSP supports at most " +
                                            std::to_string(kHeldKarpMaxNodes) + " nodes");
  }

  const TspSpec& spec() const { return spec_; }

  ModelSense sense() const override { return ModelSense::Minimize; }
  OracleCapabilities capabilities() const override {
    return {spec_.nodes <= kTspLpMaxNodes, true, spec_.edge_count()};
  }
  std::string fingerprint() const override { return "tsp v=" + std::to_string(spec_.nodes); }
  std::unique_ptr<Oracle> clone() const override { return std::make_unique<Tsp>(*this); }

  bool is_feasible(std::span<const double> w, double tol = 1e-6) const override {
    const std::size_t v = spec_.nodes;
    if (w.size() != spec_.edge_count()) return false;
    std::vector<std::vector<std::size_t>> adj(v);
    for (std::size_t i = 0; i < v; ++i)
      for (std::size_t j = i + 1; j < v; ++j) {
        const double x = w[tsp_edge_index(v, i, j)];
        if (std::abs(x) > tol && std::abs(x - 1.0) > tol) return false;
        if (x > 0.5) {
          adj[i].push_back(j);
          adj[j].push_back(i);
        }
      }
    for (const auto& a : adj)
      if (a.size() != 2) return false;
    // Degree 2 everywhere; a Hamiltonian cycle iff the walk from 0 covers all nodes.
    std::size_t prev = 0, cur = adj[0][0], seen = 1;
    while (cur != 0) {
      const std::size_t next = adj[cur][0] == prev ? adj[cur][1] : adj[cur][0];
      prev = cur;
      cur = next;
      ++seen;
    }
    return seen == v;
  }

  TspRelaxation relax(std::span<const double> cost, TspFormulation f) const {
    return tsp_lp_relax(spec_.nodes, cost, f);
  }

 protected:
  Solution do_solve(std::span<const double> cost) override {
    const auto table = held_karp(cost);
    const std::size_t m = spec_.nodes - 1;
    const std::uint32_t full = (1u << m) - 1;
    std::size_t last = 0;
    double best = kInf;
    for (std::size_t j = 0; j < m; ++j) {
      const double val = table[full * m + j] + c(cost, j + 1, 0);
      if (strictly_less(val, best)) {
        best = val;
        last = j;
      }
    }
    std::vector<std::size_t> tour{0};
    std::vector<std::size_t> rev;
    std::uint32_t mask = full;
    std::size_t j = last;
    while (true) {
      rev.push_back(j + 1);
      const std::uint32_t prev_mask = mask & ~(1u << j);
      if (prev_mask == 0) break;
      std::size_t pick = m;
      double pick_val = kInf;
      for (std::size_t k = 0; k < m; ++k) {
        if (!(prev_mask & (1u << k))) continue;
        const double val = table[prev_mask * m + k] + c(cost, k + 1, j + 1);
        if (strictly_less(val, pick_val)) {
          pick_val = val;
          pick = k;
        }
      }
      mask = prev_mask;
      j = pick;
    }
    tour.insert(tour.end(), rev.rbegin(), rev.rend());
    return {tour_to_edges(spec_.nodes, tour), 0.0};
  }

  Solution do_solve_relaxed(std::span<const double> cost) override {
    return relax(cost, spec_.relaxation).projected;
  }

  std::vector<Solution> do_enumerate(std::span<const double> cost, std::size_t budget) override {
    const auto table = held_karp(cost);
    const std::size_t m = spec_.nodes - 1;
    const std::uint32_t full = (1u << m) - 1;
    double opt = kInf;
    for (std::size_t j = 0; j < m; ++j) opt = std::min(opt, table[full * m + j] + c(cost, j + 1, 0));
    const double tol = opt_tol(opt);

    std::set<Vec> tours;
    std::vector<std::size_t> rev;
    // suffix = cost of the path already fixed from node j+1 back to the depot.
    auto walk = [&](auto&& self, std::uint32_t mask, std::size_t j, double suffix) -> void {
      rev.push_back(j + 1);
      const std::uint32_t prev_mask = mask & ~(1u << j);
      if (prev_mask == 0) {
        std::vector<std::size_t> tour{0};
        tour.insert(tour.end(), rev.rbegin(), rev.rend());
        tours.insert(tour_to_edges(spec_.nodes, tour));
        if (tours.size() > budget)
          throw Error(ErrorKind::SizeLimit, "optimal set exceeds enumeration budget");
      } else {
        for (std::size_t k = 0; k < m; ++k) {
          if (!(prev_mask & (1u << k))) continue;
          const double step = c(cost, k + 1, j + 1);
          if (table[prev_mask * m + k] + step + suffix <= opt + tol)
            self(self, prev_mask, k, suffix + step);
        }
      }
      rev.pop_back();
    };
    for (std::size_t j = 0; j < m; ++j) {
      const double back = c(cost, j + 1, 0);
      if (table[full * m + j] + back <= opt + tol) walk(walk, full, j, back);
    }
    std::vector<Solution> out;
    for (const auto& w : tours) out.push_back({w, 0.0});
    return out;
  }

 private:
  // Smaller by more than the tie tolerance; anything finite beats +inf.
  static bool strictly_less(double val, double best) {
    if (best == kInf) return val < kInf;
    return val < best - 1e-12 * std::max(1.0, std::abs(best));
  }

  double c(std::span<const double> cost, std::size_t i, std::size_t j) const {
    return cost[tsp_edge_index(spec_.nodes, i, j)];
  }

  // table[mask * m + j]: shortest path from 0 through exactly the nodes in
  // `mask` (bit k = node k+1), ending at node j+1.
  std::vector<double> held_karp(std::span<const double> cost) const {
    if (spec_.nodes > kHeldKarpMaxNodes)
      throw Error(ErrorKind::SizeLimit, "Held-Karp supports at most " +
                                            std::to_string(kHeldKarpMaxNodes) + " nodes");
    const std::size_t m = spec_.nodes - 1;
    const std::uint32_t states = 1u << m;
    std::vector<double> table(static_cast<std::size_t>(states) * m, kInf);
    for (std::size_t j = 0; j < m; ++j) table[(1u << j) * m + j] = c(cost, 0, j + 1);
    for (std::uint32_t mask = 1; mask < states; ++mask) {
      for (std::size_t j = 0; j < m; ++j) {
        if (!(mask & (1u << j))) continue;
        const double base = table[mask * m + j];
        if (base == kInf) continue;
        for (std::size_t k = 0; k < m; ++k) {
          if (mask & (1u << k)) continue;
          double& slot = table[(mask | (1u << k)) * m + k];
          slot = std::min(slot, base + c(cost, j + 1, k + 1));
        }
      }
    }
    return table;
  }

  TspSpec spec_;
};

}  // namespace dfl
