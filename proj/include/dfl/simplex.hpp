#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "dfl/core.hpp"

namespace dfl {

enum class RowSense { LessEqual, Equal, GreaterEqual };
enum class LpStatus { Optimal, Infeasible, Unbounded };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// optimize c'x  s.t.  A x (row_sense) b,  lower <= x <= upper.
// Empty bound vectors mean [0, +inf); empty row_sense means all rows are <=.
struct LpProblem {
  Matrix A;
  Vec b;
  Vec c;
  ModelSense sense = ModelSense::Minimize;
  Vec lower;
  Vec upper;
  std::vector<RowSense> row_sense;
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vec x;
  double objective = 0.0;
  std::size_t iterations = 0;
};

namespace detail {

// Dense tableau for min c'x, Ax = b (b >= 0), 0 <= x <= upper. Row m holds
// reduced costs; its last entry is -z. Finite upper bounds stay implicit: a
// nonbasic column at its upper bound is complemented (x = u - x'), so every
// nonbasic column sits at zero in the tableau.
class Tableau {
 public:
  Tableau(std::size_t m, std::size_t n)
      : m_(m), n_(n), t_((m + 1) * (n + 1), 0.0), basis_(m), upper_(n, kInf), flipped_(n, false) {}

  double& at(std::size_t r, std::size_t c) { return t_[r * (n_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return t_[r * (n_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, n_); }
  double& cost(std::size_t c) { return at(m_, c); }

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }
  double& upper(std::size_t j) { return upper_[j]; }

  void pivot(std::size_t pr, std::size_t pc) {
    const std::size_t w = n_ + 1;
    double* prow = &t_[pr * w];
    const double inv = 1.0 / prow[pc];
    for (std::size_t j = 0; j < w; ++j) prow[j] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r <= m_; ++r) {
      if (r == pr) continue;
      double* row = &t_[r * w];
      const double f = row[pc];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < w; ++j) row[j] -= f * prow[j];
      row[pc] = 0.0;
    }
    basis_[pr] = pc;
  }

  // Load reduced costs for objective `c` (size n) given the current basis.
  void price(const Vec& c) {
    double constant = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      cost(j) = flipped_[j] ? -c[j] : c[j];
      if (flipped_[j]) constant += c[j] * upper_[j];
    }
    cost(n_) = -constant;
    for (std::size_t r = 0; r < m_; ++r) {
      const std::size_t b = basis_[r];
      const double cb = flipped_[b] ? -c[b] : c[b];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) cost(j) -= cb * at(r, j);
    }
  }

  // Value of column j at the current basis, undoing any complement.
  Vec levels() {
    Vec x(n_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) x[basis_[r]] = rhs(r);
    for (std::size_t j = 0; j < n_; ++j)
      if (flipped_[j]) x[j] = upper_[j] - x[j];
    return x;
  }

  // Runs primal simplex on the loaded objective. Columns with allowed[j] ==
  // false never enter. Dantzig pricing until the first degenerate pivot, then
  // Bland's smallest-index rule for the remainder, which rules out cycling.
  LpStatus optimize(const std::vector<bool>& allowed, std::size_t& iterations) {
    constexpr double kCostTol = 1e-9;
    constexpr double kPivotTol = 1e-9;
    bool bland = false;
    const std::size_t cap = 50000 + 200 * (m_ + n_);
    for (std::size_t it = 0; it < cap; ++it) {
      std::size_t enter = n_;
      double best = -kCostTol;
      for (std::size_t j = 0; j < n_; ++j) {
        if (!allowed[j]) continue;
        const double d = at(m_, j);
        if (d < best) {
          enter = j;
          if (bland) break;
          best = d;
        }
      }
      if (enter == n_) return LpStatus::Optimal;

      // Ratio test: a basic column reaching zero or its upper bound, or the
      // entering column reaching its own upper bound.
      std::size_t leave = m_;
      bool leave_at_upper = false;
      double ratio = upper_[enter];
      for (std::size_t r = 0; r < m_; ++r) {
        const double a = at(r, enter);
        double q;
        if (a > kPivotTol) {
          q = rhs(r) / a;
        } else if (a < -kPivotTol && upper_[basis_[r]] < kInf) {
          q = (upper_[basis_[r]] - rhs(r)) / -a;
        } else {
          continue;
        }
        if (q < ratio - 1e-12 ||
            (q <= ratio + 1e-12 && (leave == m_ ? q < ratio : basis_[r] < basis_[leave]))) {
          ratio = std::min(q, ratio);
          leave = r;
          leave_at_upper = a < 0.0;
        }
      }
      if (ratio == kInf) return LpStatus::Unbounded;
      ++iterations;
      if (leave == m_) {
        complement(enter);
        continue;
      }
      if (ratio <= 1e-12) bland = true;
      if (leave_at_upper) complement_basic(leave);
      pivot(leave, enter);
    }
    throw Error(ErrorKind::InvalidArgument, "simplex: iteration limit reached");
  }

 private:
  // Nonbasic column j jumps to its other bound: x_j = u_j - x_j'.
  void complement(std::size_t j) {
    const double u = upper_[j];
    for (std::size_t r = 0; r <= m_; ++r) {
      double& a = at(r, j);
      at(r, n_) -= u * a;
      a = -a;
    }
    flipped_[j] = !flipped_[j];
  }

  // Basic column of row r is replaced by its complement.
  void complement_basic(std::size_t r) {
    const std::size_t b = basis_[r];
    for (std::size_t j = 0; j <= n_; ++j) at(r, j) = -at(r, j);
    at(r, b) = 1.0;
    rhs(r) += upper_[b];
    flipped_[b] = !flipped_[b];
  }

  std::size_t m_;
  std::size_t n_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
  Vec upper_;
  std::vector<bool> flipped_;
};

}  // namespace detail

// Two-phase dense tableau simplex with implicit upper bounds. Infeasible and unbounded problems are
// reported through LpResult::status.
inline LpResult simplex_solve(const LpProblem& lp) {
  const std::size_t k = lp.A.rows();
  const std::size_t d = lp.c.size();
  if (lp.A.cols() != d && k > 0) require_dim(lp.A.cols(), d, "LP matrix columns");
  require_dim(lp.b.size(), k, "LP right-hand side");
  if (!lp.lower.empty()) require_dim(lp.lower.size(), d, "LP lower bounds");
  if (!lp.upper.empty()) require_dim(lp.upper.size(), d, "LP upper bounds");
  if (!lp.row_sense.empty()) require_dim(lp.row_sense.size(), k, "LP row senses");
  if (!all_finite(lp.A.data()) || !all_finite(lp.b) || !all_finite(lp.c))
    throw Error(ErrorKind::InvalidArgument, "LP data must be finite");

  auto lo = [&](std::size_t j) { return lp.lower.empty() ? 0.0 : lp.lower[j]; };
  auto hi = [&](std::size_t j) { return lp.upper.empty() ? kInf : lp.upper[j]; };

  // Column map: x_j = shift_j + pos_j - neg_j (neg only for free variables).
  struct ColMap {
    double shift;
    std::size_t pos;
    std::size_t neg;  // npos when absent
  };
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<ColMap> cmap(d);
  std::size_t nstruct = 0;
  for (std::size_t j = 0; j < d; ++j) {
    if (lo(j) > hi(j)) return {LpStatus::Infeasible, {}, 0.0, 0};
    if (std::isfinite(lo(j))) {
      cmap[j] = {lo(j), nstruct++, npos};
    } else if (std::isfinite(hi(j))) {
      // x = hi - x', x' >= 0: encode as pos = npos-style negative column.
      cmap[j] = {hi(j), npos, nstruct++};
    } else {
      cmap[j] = {0.0, nstruct, nstruct + 1};
      nstruct += 2;
    }
  }

  // Assemble rows over structural columns: coefficients, relation, rhs.
  struct Row {
    std::vector<double> a;
    RowSense rel;
    double rhs;
  };
  std::vector<Row> rows;
  rows.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    Row row{std::vector<double>(nstruct, 0.0),
            lp.row_sense.empty() ? RowSense::LessEqual : lp.row_sense[i], lp.b[i]};
    for (std::size_t j = 0; j < d; ++j) {
      const double a = lp.A(i, j);
      if (a == 0.0) continue;
      row.rhs -= a * cmap[j].shift;
      if (cmap[j].pos != npos) row.a[cmap[j].pos] += a;
      if (cmap[j].neg != npos) row.a[cmap[j].neg] -= a;
    }
    rows.push_back(std::move(row));
  }
  for (auto& row : rows) {
    if (row.rhs < 0.0) {
      row.rhs = -row.rhs;
      for (double& a : row.a) a = -a;
      if (row.rel == RowSense::LessEqual) row.rel = RowSense::GreaterEqual;
      else if (row.rel == RowSense::GreaterEqual) row.rel = RowSense::LessEqual;
    }
  }

  const std::size_t m = rows.size();
  std::size_t nslack = 0, nart = 0;
  for (const auto& row : rows) {
    if (row.rel != RowSense::Equal) ++nslack;
    if (row.rel != RowSense::LessEqual) ++nart;
  }
  const std::size_t n = nstruct + nslack + nart;
  const std::size_t art0 = nstruct + nslack;
  detail::Tableau tab(m, n);
  for (std::size_t j = 0; j < d; ++j)
    if (std::isfinite(lo(j)) && std::isfinite(hi(j))) tab.upper(cmap[j].pos) = hi(j) - lo(j);
  std::size_t s = nstruct, a = art0;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < nstruct; ++j) tab.at(r, j) = rows[r].a[j];
    tab.rhs(r) = rows[r].rhs;
    switch (rows[r].rel) {
      case RowSense::LessEqual:
        tab.at(r, s) = 1.0;
        tab.basis()[r] = s++;
        break;
      case RowSense::GreaterEqual:
        tab.at(r, s++) = -1.0;
        tab.at(r, a) = 1.0;
        tab.basis()[r] = a++;
        break;
      case RowSense::Equal:
        tab.at(r, a) = 1.0;
        tab.basis()[r] = a++;
        break;
    }
  }

  LpResult result;
  std::vector<bool> allowed(n, true);
  if (nart > 0) {
    Vec phase1(n, 0.0);
    for (std::size_t j = art0; j < n; ++j) phase1[j] = 1.0;
    tab.price(phase1);
    tab.optimize(allowed, result.iterations);
    double scale = 1.0;
    for (const auto& row : rows) scale = std::max(scale, std::abs(row.rhs));
    if (-tab.cost(n) > 1e-7 * scale) {
      result.status = LpStatus::Infeasible;
      return result;
    }
    // Drive remaining (zero-level) artificials out of the basis where possible.
    for (std::size_t r = 0; r < m; ++r) {
      if (tab.basis()[r] < art0) continue;
      for (std::size_t j = 0; j < art0; ++j)
        if (std::abs(tab.at(r, j)) > 1e-9) {
          tab.pivot(r, j);
          break;
        }
    }
    for (std::size_t j = art0; j < n; ++j) allowed[j] = false;
  }

  const double sign = sense_sign(lp.sense);
  Vec phase2(n, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    if (cmap[j].pos != npos) phase2[cmap[j].pos] += sign * lp.c[j];
    if (cmap[j].neg != npos) phase2[cmap[j].neg] -= sign * lp.c[j];
  }
  tab.price(phase2);
  if (tab.optimize(allowed, result.iterations) == LpStatus::Unbounded) {
    result.status = LpStatus::Unbounded;
    return result;
  }

  const Vec level = tab.levels();
  result.x.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double v = cmap[j].shift;
    if (cmap[j].pos != npos) v += level[cmap[j].pos];
    if (cmap[j].neg != npos) v -= level[cmap[j].neg];
    result.x[j] = v;
  }
  result.objective = dot(lp.c, result.x);
  result.status = LpStatus::Optimal;
  return result;
}

}  // namespace dfl
