#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "repgame/common.hpp"

namespace repgame::lp {

// Dense two-phase simplex for the small programs this library needs
// (best-reply polytopes, minmax values, convex-hull membership).  All
// variables are nonnegative; callers shift free variables themselves.

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  double value = 0.0;
  std::vector<double> x;
  bool ok() const { return status == Status::Optimal; }
};

class Problem {
 public:
  explicit Problem(std::size_t num_vars) : n_(num_vars), c_(num_vars, 0.0) {}

  void set_objective(std::vector<double> minimize_coeffs) {
    c_ = std::move(minimize_coeffs);
  }
  void add_eq(std::vector<double> a, double b) { rows_.push_back({std::move(a), b, 0}); }
  void add_le(std::vector<double> a, double b) { rows_.push_back({std::move(a), b, -1}); }
  void add_ge(std::vector<double> a, double b) { rows_.push_back({std::move(a), b, +1}); }

  std::size_t num_vars() const { return n_; }

  Result solve() const;

 private:
  struct Row {
    std::vector<double> a;
    double b;
    int sense;  // 0 eq, -1 le, +1 ge
  };
  std::size_t n_;
  std::vector<double> c_;
  std::vector<Row> rows_;
};

namespace detail {

inline constexpr double kPivTol = 1e-10;

// Tableau with rows m, columns: structural+slack vars, then artificials,
// then rhs.  Bland's rule throughout.
struct Tableau {
  std::size_t m, n;                 // rows, non-artificial columns
  std::size_t total;                // columns incl. artificials (excl. rhs)
  std::vector<std::vector<double>> t;  // m rows of (total+1)
  std::vector<std::size_t> basis;      // basic column per row

  void pivot(std::size_t pr, std::size_t pc) {
    double piv = t[pr][pc];
    for (auto& v : t[pr]) v /= piv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == pr) continue;
      double f = t[r][pc];
      if (std::abs(f) < kPivTol) continue;
      for (std::size_t c = 0; c <= total; ++c) t[r][c] -= f * t[pr][c];
    }
    basis[pr] = pc;
  }

  // Minimize cost over current feasible basis; cost given per column.
  // Returns false on unboundedness.
  bool optimize(std::vector<double>& cost, double& objective,
                std::size_t usable_cols) {
    // Reduced-cost row maintained implicitly: z_j - c_j via basis costs.
    for (;;) {
      std::size_t pc = total + 1;
      for (std::size_t c = 0; c < usable_cols; ++c) {
        double red = -cost[c];
        for (std::size_t r = 0; r < m; ++r) red += cost[basis[r]] * t[r][c];
        if (red > 1e-9) { pc = c; break; }  // Bland: first improving column
      }
      if (pc > total) break;  // optimal
      std::size_t pr = m;
      double best = 0.0;
      for (std::size_t r = 0; r < m; ++r) {
        if (t[r][pc] > kPivTol) {
          double ratio = t[r][total] / t[r][pc];
          if (pr == m || ratio < best - 1e-12 ||
              (std::abs(ratio - best) <= 1e-12 && basis[r] < basis[pr])) {
            pr = r;
            best = ratio;
          }
        }
      }
      if (pr == m) return false;  // unbounded
      pivot(pr, pc);
    }
    objective = 0.0;
    for (std::size_t r = 0; r < m; ++r) objective += cost[basis[r]] * t[r][total];
    return true;
  }
};

}  // namespace detail

inline Result Problem::solve() const {
  using detail::Tableau;
  const std::size_t m = rows_.size();
  std::size_t slacks = 0;
  for (const auto& r : rows_) slacks += (r.sense != 0) ? 1 : 0;
  const std::size_t n = n_ + slacks;

  Tableau tb;
  tb.m = m;
  tb.n = n;
  tb.total = n + m;  // one artificial per row
  tb.t.assign(m, std::vector<double>(tb.total + 1, 0.0));
  tb.basis.assign(m, 0);

  std::size_t slack_at = n_;
  for (std::size_t r = 0; r < m; ++r) {
    const auto& row = rows_[r];
    if (row.a.size() != n_) throw InputError("lp: bad row width");
    for (std::size_t c = 0; c < n_; ++c) tb.t[r][c] = row.a[c];
    if (row.sense == -1) tb.t[r][slack_at++] = 1.0;   // a.x + s = b
    else if (row.sense == 1) tb.t[r][slack_at++] = -1.0;  // a.x - s = b
    tb.t[r][tb.total] = row.b;
    if (tb.t[r][tb.total] < 0.0)
      for (std::size_t c = 0; c <= tb.total; ++c) tb.t[r][c] = -tb.t[r][c];
    tb.t[r][n + r] = 1.0;  // artificial
    tb.basis[r] = n + r;
  }

  Result res;

  // Phase 1: drive artificials to zero.
  std::vector<double> cost1(tb.total, 0.0);
  for (std::size_t c = n; c < tb.total; ++c) cost1[c] = 1.0;
  double obj1 = 0.0;
  if (!tb.optimize(cost1, obj1, n)) {
    res.status = Status::Unbounded;  // cannot happen in phase 1
    return res;
  }
  if (obj1 > 1e-7) {
    res.status = Status::Infeasible;
    return res;
  }
  // Pivot any lingering artificials out of the basis.
  for (std::size_t r = 0; r < m; ++r) {
    if (tb.basis[r] < n) continue;
    std::size_t pc = n;
    for (std::size_t c = 0; c < n; ++c)
      if (std::abs(tb.t[r][c]) > detail::kPivTol) { pc = c; break; }
    if (pc < n) tb.pivot(r, pc);
    // else: redundant row; its artificial stays basic at value 0.
  }

  // Phase 2.
  std::vector<double> cost2(tb.total, 0.0);
  for (std::size_t c = 0; c < n_ && c < c_.size(); ++c) cost2[c] = c_[c];
  double obj2 = 0.0;
  if (!tb.optimize(cost2, obj2, n)) {
    res.status = Status::Unbounded;
    return res;
  }
  res.status = Status::Optimal;
  res.value = obj2;
  res.x.assign(n_, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    if (tb.basis[r] < n_) res.x[tb.basis[r]] = tb.t[r][tb.total];
  return res;
}

}  // namespace repgame::lp
