#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "repgame/common.hpp"
#include "repgame/linprog.hpp"
#include "repgame/prob.hpp"

namespace repgame {

// Finite stage game: states theta, player-1 actions a, player-2 actions b.
// Player 2's payoff does not depend on the state.
struct StageGame {
  std::vector<std::string> theta_labels;
  std::vector<std::string> a_labels;
  std::vector<std::string> b_labels;
  std::vector<double> u1_table;  // (theta*na + a)*nb + b
  std::vector<double> u2_table;  // a*nb + b

  int num_theta() const { return static_cast<int>(theta_labels.size()); }
  int num_a() const { return static_cast<int>(a_labels.size()); }
  int num_b() const { return static_cast<int>(b_labels.size()); }

  double u1(int theta, int a, int b) const {
    return u1_table[(static_cast<std::size_t>(theta) * a_labels.size() + a) *
                        b_labels.size() +
                    b];
  }
  double u2(int a, int b) const {
    return u2_table[static_cast<std::size_t>(a) * b_labels.size() + b];
  }

  double u1_min() const { return *std::min_element(u1_table.begin(), u1_table.end()); }
  double u1_max() const { return *std::max_element(u1_table.begin(), u1_table.end()); }

  void validate() const {
    if (theta_labels.empty() || a_labels.empty() || b_labels.empty())
      throw InputError("StageGame: empty label set");
    auto distinct = [](std::vector<std::string> v) {
      std::sort(v.begin(), v.end());
      return std::adjacent_find(v.begin(), v.end()) == v.end();
    };
    if (!distinct(theta_labels) || !distinct(a_labels) || !distinct(b_labels))
      throw InputError("StageGame: duplicate labels");
    if (u1_table.size() != theta_labels.size() * a_labels.size() * b_labels.size())
      throw InputError("StageGame: u1 table size mismatch");
    if (u2_table.size() != a_labels.size() * b_labels.size())
      throw InputError("StageGame: u2 table size mismatch");
  }

  int a_index(const std::string& label) const {
    for (int i = 0; i < num_a(); ++i)
      if (a_labels[i] == label) return i;
    throw InputError("StageGame: unknown action label " + label);
  }
};

// Feasibility sets are nonempty subsets of A encoded as bitmasks.
using SubsetMask = unsigned;

inline int subset_size(SubsetMask w) {
  int c = 0;
  while (w) { c += w & 1u; w >>= 1; }
  return c;
}

// Joint distribution over (theta, omega) with omega ranging over the
// nonempty subsets of A.
struct Environment {
  int num_theta = 0;
  int num_a = 0;
  // p[theta * (1<<num_a) + mask]; mask 0 must carry zero mass.
  std::vector<double> joint_p;

  double p(int theta, SubsetMask w) const {
    return joint_p[static_cast<std::size_t>(theta) * (1u << num_a) + w];
  }

  Dist p_theta() const {
    Dist out(num_theta, 0.0);
    for (int th = 0; th < num_theta; ++th)
      for (SubsetMask w = 1; w < (1u << num_a); ++w) out[th] += p(th, w);
    return out;
  }

  double p_omega(SubsetMask w) const {
    double s = 0.0;
    for (int th = 0; th < num_theta; ++th) s += p(th, w);
    return s;
  }

  // min over a of P(omega = {a}).
  double rho_lower() const {
    double r = kInf;
    for (int a = 0; a < num_a; ++a) r = std::min(r, p_omega(1u << a));
    return r;
  }

  // P(omega = A).
  double flexibility() const { return p_omega((1u << num_a) - 1); }

  bool assumption1() const { return rho_lower() > 0.0; }
  bool eps_flexible(double eps) const { return flexibility() >= 1.0 - eps; }

  void validate() const {
    if (joint_p.size() != static_cast<std::size_t>(num_theta) << num_a)
      throw InputError("Environment: table size mismatch");
    double sum = 0.0;
    for (int th = 0; th < num_theta; ++th) {
      if (p(th, 0) != 0.0) throw InputError("Environment: mass on empty omega");
      for (SubsetMask w = 0; w < (1u << num_a); ++w) {
        double v = p(th, w);
        if (v < -kProbTol) throw InputError("Environment: negative probability");
        sum += v;
      }
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw InputError("Environment: probabilities sum to " + std::to_string(sum));
  }
};

// Builds the environment used throughout the product-choice discussions:
// omega = A with probability 1 - |A|*eps and each singleton with
// probability eps, independent of theta.
inline Environment make_flexible_env(const StageGame& game, const Dist& p_theta,
                                     double eps) {
  Environment env;
  env.num_theta = game.num_theta();
  env.num_a = game.num_a();
  env.joint_p.assign(static_cast<std::size_t>(env.num_theta) << env.num_a, 0.0);
  SubsetMask full = (1u << env.num_a) - 1;
  double p_full = 1.0 - eps * env.num_a;
  if (p_full < 0.0) throw InputError("make_flexible_env: eps too large");
  for (int th = 0; th < env.num_theta; ++th) {
    env.joint_p[(static_cast<std::size_t>(th) << env.num_a) + full] =
        p_theta[th] * p_full;
    // += so a single-action game, where {a} is the full set, keeps its mass
    for (int a = 0; a < env.num_a; ++a)
      env.joint_p[(static_cast<std::size_t>(th) << env.num_a) + (1u << a)] +=
          p_theta[th] * eps;
  }
  return env;
}

// Signal structure for the public keep-word signal y ~ F(.|a,m), plus the
// optional bounded-memory signal z ~ G(.|m,a).
struct SignalStructure {
  std::vector<std::string> y_labels;
  // F[(a*na + m)*ny + y]
  std::vector<double> f_table;
  std::vector<std::string> z_labels;  // empty when absent
  std::vector<double> g_table;        // G[(m*na + a)*nz + z]
  int memory_K = 0;
  int num_a = 0;

  int num_y() const { return static_cast<int>(y_labels.size()); }
  int num_z() const { return static_cast<int>(z_labels.size()); }
  bool has_z() const { return !z_labels.empty(); }

  Dist f_row(int a, int m) const {
    Dist r(y_labels.size());
    std::size_t base = (static_cast<std::size_t>(a) * num_a + m) * y_labels.size();
    for (std::size_t y = 0; y < r.size(); ++y) r[y] = f_table[base + y];
    return r;
  }

  Dist g_row(int m, int a) const {
    Dist r(z_labels.size());
    std::size_t base = (static_cast<std::size_t>(m) * num_a + a) * z_labels.size();
    for (std::size_t z = 0; z < r.size(); ++z) r[z] = g_table[base + z];
    return r;
  }

  // Common diagonal row F* when Assumption 2(i) holds.
  Dist f_star() const { return f_row(0, 0); }

  void validate() const {
    if (y_labels.empty() || num_a <= 0)
      throw InputError("SignalStructure: empty Y or A");
    if (f_table.size() !=
        static_cast<std::size_t>(num_a) * num_a * y_labels.size())
      throw InputError("SignalStructure: F table size mismatch");
    for (int a = 0; a < num_a; ++a)
      for (int m = 0; m < num_a; ++m)
        if (!is_distribution(f_row(a, m), 1e-9))
          throw InputError("SignalStructure: F row is not a distribution");
    if (has_z()) {
      if (g_table.size() !=
          static_cast<std::size_t>(num_a) * num_a * z_labels.size())
        throw InputError("SignalStructure: G table size mismatch");
      for (int m = 0; m < num_a; ++m)
        for (int a = 0; a < num_a; ++a)
          if (!is_distribution(g_row(m, a), 1e-9))
            throw InputError("SignalStructure: G row is not a distribution");
    }
    if (memory_K < 0) throw InputError("SignalStructure: negative memory K");
  }
};

// y = 1{a = m} with labels {"0","1"}.
inline SignalStructure make_indicator_signals(int num_a) {
  SignalStructure s;
  s.num_a = num_a;
  s.y_labels = {"0", "1"};
  s.f_table.assign(static_cast<std::size_t>(num_a) * num_a * 2, 0.0);
  for (int a = 0; a < num_a; ++a)
    for (int m = 0; m < num_a; ++m)
      s.f_table[(static_cast<std::size_t>(a) * num_a + m) * 2 + (a == m ? 1 : 0)] = 1.0;
  return s;
}

// --- best replies ---------------------------------------------------------

// Full argmax set of player 2's expected payoff against a mixture over A.
inline std::vector<int> best_reply_set(const StageGame& game, const Dist& mix) {
  if (static_cast<int>(mix.size()) != game.num_a() || !is_distribution(mix, 1e-9))
    throw InputError("best_reply_set: invalid distribution over A");
  std::vector<double> val(game.num_b(), 0.0);
  for (int b = 0; b < game.num_b(); ++b)
    for (int a = 0; a < game.num_a(); ++a) val[b] += mix[a] * game.u2(a, b);
  double best = *std::max_element(val.begin(), val.end());
  std::vector<int> out;
  for (int b = 0; b < game.num_b(); ++b)
    if (val[b] >= best - kPayoffTol) out.push_back(b);
  return out;
}

inline std::vector<int> best_reply_set_pure(const StageGame& game, int a) {
  Dist mix(game.num_a(), 0.0);
  mix[a] = 1.0;
  return best_reply_set(game, mix);
}

// min over BR2(a) of u1(theta, a, .): the pessimistic commitment payoff of a.
inline double commitment_value(const StageGame& game, int theta, int a) {
  double v = kInf;
  for (int b : best_reply_set_pure(game, a)) v = std::min(v, game.u1(theta, a, b));
  return v;
}

// --- Stackelberg ----------------------------------------------------------

struct StackelbergResult {
  std::vector<int> a_star;       // per state, ties broken by label order
  std::vector<double> v1_star;   // per state
  double expected = 0.0;
};

inline StackelbergResult stackelberg(const StageGame& game, const Dist& p_theta) {
  if (static_cast<int>(p_theta.size()) != game.num_theta() ||
      !is_distribution(p_theta, 1e-9))
    throw InputError("stackelberg: invalid distribution over Theta");
  StackelbergResult r;
  r.a_star.resize(game.num_theta());
  r.v1_star.resize(game.num_theta());
  for (int th = 0; th < game.num_theta(); ++th) {
    int best_a = 0;
    double best_v = -kInf;
    for (int a = 0; a < game.num_a(); ++a) {
      double v = commitment_value(game, th, a);
      if (v > best_v + kPayoffTol) {
        best_v = v;
        best_a = a;
      }
    }
    r.a_star[th] = best_a;
    r.v1_star[th] = best_v;
    r.expected += p_theta[th] * best_v;
  }
  return r;
}

// u1*(theta, omega): Stackelberg payoff restricted to feasible actions.
struct FeasibleCommitmentResult {
  // value[theta * (1<<na) + mask], only nonempty masks populated
  std::vector<double> value;
  double expected = 0.0;
};

inline double feasible_commitment_value(const StageGame& game, int theta,
                                        SubsetMask w) {
  double best = -kInf;
  for (int a = 0; a < game.num_a(); ++a)
    if (w & (1u << a)) best = std::max(best, commitment_value(game, theta, a));
  return best;
}

inline FeasibleCommitmentResult feasible_commitment(const StageGame& game,
                                                    const Environment& env) {
  if (env.num_a != game.num_a() || env.num_theta != game.num_theta())
    throw InputError("feasible_commitment: environment/game mismatch");
  FeasibleCommitmentResult r;
  r.value.assign(static_cast<std::size_t>(game.num_theta()) << game.num_a(), 0.0);
  for (int th = 0; th < game.num_theta(); ++th)
    for (SubsetMask w = 1; w < (1u << game.num_a()); ++w) {
      double v = feasible_commitment_value(game, th, w);
      r.value[(static_cast<std::size_t>(th) << game.num_a()) + w] = v;
      r.expected += env.p(th, w) * v;
    }
  return r;
}

// --- minmax ---------------------------------------------------------------

// min over mixed b of max over a of E u1(theta, a, .), by LP.
inline double minmax_value(const StageGame& game, int theta) {
  const int nb = game.num_b();
  const int na = game.num_a();
  // Shift payoffs positive so the value variable can be kept nonnegative.
  double shift = 1.0 - game.u1_min();
  lp::Problem p(nb + 1);  // q_0..q_{nb-1}, v
  std::vector<double> obj(nb + 1, 0.0);
  obj[nb] = 1.0;
  p.set_objective(obj);
  std::vector<double> ones(nb + 1, 1.0);
  ones[nb] = 0.0;
  p.add_eq(ones, 1.0);
  for (int a = 0; a < na; ++a) {
    std::vector<double> row(nb + 1, 0.0);
    for (int b = 0; b < nb; ++b) row[b] = -(game.u1(theta, a, b) + shift);
    row[nb] = 1.0;
    p.add_ge(row, 0.0);  // v >= sum_b q_b (u1 + shift)
  }
  auto res = p.solve();
  if (!res.ok()) throw InternalError("minmax_value: LP failed");
  return res.value - shift;
}

struct MinmaxResult {
  std::vector<double> per_state;
  double expected = 0.0;
};

inline MinmaxResult minmax(const StageGame& game, const Dist& p_theta) {
  MinmaxResult r;
  r.per_state.resize(game.num_theta());
  for (int th = 0; th < game.num_theta(); ++th) {
    r.per_state[th] = minmax_value(game, th);
    r.expected += p_theta[th] * r.per_state[th];
  }
  return r;
}

// --- assumptions ----------------------------------------------------------

struct AssumptionReport {
  bool a1 = false;            // every singleton omega has positive probability
  double rho_lower = 0.0;
  double flexibility = 0.0;   // P(omega = A)
  bool a2_i = false;          // all diagonal F rows coincide
  bool a2_ii = false;         // F* outside hull of off-diagonal rows
};

inline bool f_star_outside_hull(const SignalStructure& sig) {
  Dist fstar = sig.f_star();
  std::vector<Dist> rows;
  for (int a = 0; a < sig.num_a; ++a)
    for (int m = 0; m < sig.num_a; ++m)
      if (a != m) rows.push_back(sig.f_row(a, m));
  if (rows.empty()) return true;  // |A| = 1: hull is empty
  // Feasibility: sum_k w_k rows_k = F*, sum w = 1, w >= 0.
  lp::Problem p(rows.size());
  for (int y = 0; y < sig.num_y(); ++y) {
    std::vector<double> coef(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) coef[k] = rows[k][y];
    p.add_eq(coef, fstar[y]);
  }
  p.add_eq(std::vector<double>(rows.size(), 1.0), 1.0);
  return !p.solve().ok();
}

inline AssumptionReport check_assumptions(const Environment& env,
                                          const SignalStructure& sig) {
  AssumptionReport rep;
  rep.rho_lower = env.rho_lower();
  rep.flexibility = env.flexibility();
  rep.a1 = rep.rho_lower > 0.0;
  rep.a2_i = true;
  Dist f0 = sig.f_row(0, 0);
  for (int a = 1; a < sig.num_a; ++a) {
    Dist fa = sig.f_row(a, a);
    for (int y = 0; y < sig.num_y(); ++y)
      if (std::abs(fa[y] - f0[y]) > 1e-9) rep.a2_i = false;
  }
  rep.a2_ii = rep.a2_i && f_star_outside_hull(sig);
  return rep;
}

// --- supermodularity ------------------------------------------------------

struct SupermodularityReport {
  bool condition_part1 = false;  // order on A with u1 strictly decreasing in a
  bool condition_part2 = false;  // some Stackelberg action above the order-min
  bool lemma1_2 = false;         // order on B: u1 incr. in b, u2 incr. diffs
  std::vector<int> a_order;      // lowest first, when part1 holds
  std::vector<int> b_order;      // lowest first, when lemma1_2 holds
  bool condition() const { return condition_part1 && condition_part2; }
};

inline SupermodularityReport check_supermodularity(const StageGame& game,
                                                   const Dist& p_theta) {
  SupermodularityReport rep;
  const int na = game.num_a(), nb = game.num_b(), nth = game.num_theta();
  auto stack = stackelberg(game, p_theta);

  std::vector<int> aord(na);
  for (int i = 0; i < na; ++i) aord[i] = i;
  std::sort(aord.begin(), aord.end());
  do {
    bool dec = true;
    for (int th = 0; th < nth && dec; ++th)
      for (int b = 0; b < nb && dec; ++b)
        for (int i = 0; i + 1 < na; ++i)
          if (game.u1(th, aord[i + 1], b) >= game.u1(th, aord[i], b) - kPayoffTol) {
            dec = false;
            break;
          }
    if (dec) {
      rep.condition_part1 = true;
      rep.a_order = aord;
      for (int th = 0; th < nth; ++th)
        if (stack.a_star[th] != aord[0]) rep.condition_part2 = true;
      break;
    }
  } while (std::next_permutation(aord.begin(), aord.end()));

  std::vector<int> bord(nb);
  for (int i = 0; i < nb; ++i) bord[i] = i;
  std::sort(bord.begin(), bord.end());
  if (rep.condition_part1) {
    const auto& ao = rep.a_order;
    do {
      bool ok = true;
      // u1 strictly increasing in b for every theta, a.
      for (int th = 0; th < nth && ok; ++th)
        for (int a = 0; a < na && ok; ++a)
          for (int j = 0; j + 1 < nb; ++j)
            if (game.u1(th, a, bord[j + 1]) <= game.u1(th, a, bord[j]) + kPayoffTol) {
              ok = false;
              break;
            }
      // u2 strictly increasing differences in (a, b) under the A order.
      for (int i = 0; i + 1 < na && ok; ++i)
        for (int j = 0; j + 1 < nb; ++j) {
          double lo = game.u2(ao[i], bord[j + 1]) - game.u2(ao[i], bord[j]);
          double hi = game.u2(ao[i + 1], bord[j + 1]) - game.u2(ao[i + 1], bord[j]);
          if (hi <= lo + kPayoffTol) {
            ok = false;
            break;
          }
        }
      if (ok) {
        rep.lemma1_2 = true;
        rep.b_order = bord;
        break;
      }
    } while (std::next_permutation(bord.begin(), bord.end()));
  }
  return rep;
}

}  // namespace repgame
