#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "repgame/beliefs.hpp"
#include "repgame/prob.hpp"

namespace repgame {

// Quality-announcement variant: player 1 picks effort a, privately sees
// quality x ~ g(.|a), announces an element of X; player 2's payoff depends
// on quality, not effort.
struct QualityGame {
  std::vector<std::string> a_labels;
  std::vector<std::string> x_labels;
  std::vector<std::string> b_labels;
  std::vector<double> u1_table;  // a*nb + b
  std::vector<double> u2_table;  // x*nb + b
  std::vector<double> g_table;   // a*nx + x, rows sum to 1

  int num_a() const { return static_cast<int>(a_labels.size()); }
  int num_x() const { return static_cast<int>(x_labels.size()); }
  int num_b() const { return static_cast<int>(b_labels.size()); }

  double u1(int a, int b) const { return u1_table[a * b_labels.size() + b]; }
  double u2(int x, int b) const { return u2_table[x * b_labels.size() + b]; }
  double g(int x, int a) const { return g_table[a * x_labels.size() + x]; }

  Dist g_row(int a) const {
    Dist r(x_labels.size());
    for (int x = 0; x < num_x(); ++x) r[x] = g(x, a);
    return r;
  }

  double g_lower() const {
    double lo = 1.0;
    for (int a = 0; a < num_a(); ++a)
      for (int x = 0; x < num_x(); ++x) lo = std::min(lo, g(x, a));
    return lo;
  }
  bool full_support() const { return g_lower() > 0.0; }

  void validate() const {
    if (a_labels.empty() || x_labels.empty() || b_labels.empty())
      throw InputError("QualityGame: empty label set");
    if (u1_table.size() != a_labels.size() * b_labels.size() ||
        u2_table.size() != x_labels.size() * b_labels.size() ||
        g_table.size() != a_labels.size() * x_labels.size())
      throw InputError("QualityGame: table size mismatch");
    for (int a = 0; a < num_a(); ++a)
      if (!is_distribution(g_row(a), 1e-9))
        throw InputError("QualityGame: g row is not a distribution");
  }

  std::vector<int> best_reply_set_x(int x) const {
    double best = -kInf;
    for (int b = 0; b < num_b(); ++b) best = std::max(best, u2(x, b));
    std::vector<int> out;
    for (int b = 0; b < num_b(); ++b)
      if (u2(x, b) >= best - kPayoffTol) out.push_back(b);
    return out;
  }
};

// Eq (4.1): best effort commitment against pessimistic best replies to the
// realized quality.
struct QualityCommitment {
  int a_star = 0;
  double v_star_star = 0.0;
};

inline QualityCommitment commitment_payoff_quality(const QualityGame& q) {
  q.validate();
  QualityCommitment r;
  double best = -kInf;
  for (int a = 0; a < q.num_a(); ++a) {
    double v = 0.0;
    for (int x = 0; x < q.num_x(); ++x) {
      double worst = kInf;
      for (int b : q.best_reply_set_x(x)) worst = std::min(worst, q.u1(a, b));
      v += q.g(x, a) * worst;
    }
    if (v > best + kPayoffTol) {
      best = v;
      r.a_star = a;
    }
  }
  r.v_star_star = best;
  return r;
}

// Belief threshold analogue for announced qualities: above it, player 2
// strictly best replies to the announcement.
inline double lambda_bar_quality(const QualityGame& q) {
  // Reuse the stage-game machinery with a synthetic game in which the
  // "actions" are qualities.
  StageGame s;
  s.theta_labels = {"_"};
  s.a_labels = q.x_labels;
  s.b_labels = q.b_labels;
  s.u1_table.assign(q.x_labels.size() * q.b_labels.size(), 0.0);
  s.u2_table = q.u2_table;
  double lam = 0.0;
  for (int x = 0; x < q.num_x(); ++x)
    lam = std::max(lam, lambda_threshold_for_action(s, x));
  return lam;
}

}  // namespace repgame
