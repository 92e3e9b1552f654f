#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "repgame/linprog.hpp"
#include "repgame/stage_game.hpp"

namespace repgame {

inline void check_desk_scale(const StageGame& game) {
  if (game.num_theta() * game.num_a() > 12 || game.num_b() > 6)
    throw SizeError("game exceeds desk-scale limits (|Theta|*|A| <= 12, |B| <= 6)");
}

// --- auxiliary game without communication ---------------------------------

// One-shot Bayesian game: player 1 knows theta, player 2 does not.
struct AuxEquilibrium {
  std::vector<Dist> sigma1;  // per theta, distribution over A
  Dist sigma2;               // distribution over B
  double value = 0.0;        // player 1's ex-ante payoff
};

struct AuxNoCommResult {
  std::vector<AuxEquilibrium> equilibria;
  double v1_min = kInf;
};

namespace detail {

inline std::vector<std::vector<int>> nonempty_subsets(int n) {
  std::vector<std::vector<int>> out;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) s.push_back(i);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace detail

// Support enumeration.  For a fixed support profile the two players'
// equilibrium conditions decouple: player 1's indifference pins down a
// polytope of sigma2 (over which we minimize player 1's value), and
// player 2's indifference pins down a polytope of sigma1 (feasibility
// only).  Any pair drawn from the two polytopes is a Nash equilibrium.
inline AuxNoCommResult solve_aux_no_comm(const StageGame& game,
                                         const Dist& p_theta) {
  check_desk_scale(game);
  const int nt = game.num_theta(), na = game.num_a(), nb = game.num_b();
  AuxNoCommResult result;

  auto a_subsets = detail::nonempty_subsets(na);
  auto b_subsets = detail::nonempty_subsets(nb);

  // Iterate over per-state supports as a mixed-radix counter.
  std::vector<std::size_t> idx(nt, 0);
  for (;;) {
    for (const auto& s2 : b_subsets) {
      // sigma2 polytope + value minimization.
      lp::Problem p2(s2.size());
      {
        std::vector<double> obj(s2.size(), 0.0);
        for (int th = 0; th < nt; ++th) {
          int a0 = a_subsets[idx[th]][0];
          for (std::size_t j = 0; j < s2.size(); ++j)
            obj[j] += p_theta[th] * game.u1(th, a0, s2[j]);
        }
        p2.set_objective(obj);
      }
      p2.add_eq(std::vector<double>(s2.size(), 1.0), 1.0);
      for (int th = 0; th < nt; ++th) {
        const auto& s1 = a_subsets[idx[th]];
        int a0 = s1[0];
        for (std::size_t k = 1; k < s1.size(); ++k) {
          std::vector<double> row(s2.size());
          for (std::size_t j = 0; j < s2.size(); ++j)
            row[j] = game.u1(th, s1[k], s2[j]) - game.u1(th, a0, s2[j]);
          p2.add_eq(row, 0.0);
        }
        for (int a = 0; a < na; ++a) {
          if (std::find(s1.begin(), s1.end(), a) != s1.end()) continue;
          std::vector<double> row(s2.size());
          for (std::size_t j = 0; j < s2.size(); ++j)
            row[j] = game.u1(th, a0, s2[j]) - game.u1(th, a, s2[j]);
          p2.add_ge(row, 0.0);
        }
      }
      auto r2 = p2.solve();
      if (!r2.ok()) continue;

      // sigma1 polytope feasibility: every b in S2 a best reply to the
      // induced marginal over A.
      std::vector<std::pair<int, int>> vars;  // (theta, a)
      for (int th = 0; th < nt; ++th)
        for (int a : a_subsets[idx[th]]) vars.push_back({th, a});
      lp::Problem p1(vars.size());
      for (int th = 0; th < nt; ++th) {
        std::vector<double> row(vars.size(), 0.0);
        for (std::size_t v = 0; v < vars.size(); ++v)
          if (vars[v].first == th) row[v] = 1.0;
        p1.add_eq(row, 1.0);
      }
      int b0 = s2[0];
      for (std::size_t k = 1; k < s2.size(); ++k) {
        std::vector<double> row(vars.size());
        for (std::size_t v = 0; v < vars.size(); ++v)
          row[v] = p_theta[vars[v].first] *
                   (game.u2(vars[v].second, s2[k]) - game.u2(vars[v].second, b0));
        p1.add_eq(row, 0.0);
      }
      for (int b = 0; b < nb; ++b) {
        if (std::find(s2.begin(), s2.end(), b) != s2.end()) continue;
        std::vector<double> row(vars.size());
        for (std::size_t v = 0; v < vars.size(); ++v)
          row[v] = p_theta[vars[v].first] *
                   (game.u2(vars[v].second, b0) - game.u2(vars[v].second, b));
        p1.add_ge(row, 0.0);
      }
      auto r1 = p1.solve();
      if (!r1.ok()) continue;

      AuxEquilibrium eq;
      eq.sigma1.assign(nt, Dist(na, 0.0));
      for (std::size_t v = 0; v < vars.size(); ++v)
        eq.sigma1[vars[v].first][vars[v].second] = r1.x[v];
      // States with zero prior mass get no constraint mass; renormalize.
      for (int th = 0; th < nt; ++th) {
        double s = 0.0;
        for (double q : eq.sigma1[th]) s += q;
        if (s <= kProbTol)
          eq.sigma1[th][a_subsets[idx[th]][0]] = 1.0;
        else
          for (double& q : eq.sigma1[th]) q /= s;
      }
      eq.sigma2.assign(nb, 0.0);
      for (std::size_t j = 0; j < s2.size(); ++j) eq.sigma2[s2[j]] = r2.x[j];
      eq.value = r2.value;
      result.v1_min = std::min(result.v1_min, eq.value);
      result.equilibria.push_back(std::move(eq));
    }
    // advance the mixed-radix counter
    int pos = 0;
    while (pos < nt && ++idx[pos] == a_subsets.size()) idx[pos++] = 0;
    if (pos == nt) break;
  }
  if (result.equilibria.empty())
    throw InternalError("solve_aux_no_comm: no equilibrium found");
  return result;
}

// --- auxiliary game with an action recommendation stage -------------------

struct RecommendationEquilibrium {
  std::vector<int> recommendation;  // per theta, recommended b
  std::vector<int> action;          // per theta, player 1's action
  std::vector<int> response;        // per b-hat, player 2's response (on path)
  double value = 0.0;
};

struct AuxRecommendationResult {
  std::vector<RecommendationEquilibrium> equilibria;
  double v_hat_1 = kInf;  // +inf sentinel when no pure equilibrium exists
  bool has_pure_equilibrium() const { return !equilibria.empty(); }
};

inline AuxRecommendationResult solve_aux_recommendation(const StageGame& game,
                                                        const Dist& p_theta) {
  check_desk_scale(game);
  const int nt = game.num_theta(), na = game.num_a(), nb = game.num_b();
  AuxRecommendationResult result;

  double combos = std::pow(static_cast<double>(na * nb), nt);
  if (combos > 2e6)
    throw SizeError("solve_aux_recommendation: profile space too large");

  std::vector<int> rec(nt, 0), act(nt, 0);
  std::vector<int> code(nt, 0);  // code = rec * na + act
  for (;;) {
    for (int th = 0; th < nt; ++th) {
      rec[th] = code[th] / na;
      act[th] = code[th] % na;
    }
    // On-path recommendations and induced action distributions.
    std::vector<char> on_path(nb, 0);
    std::vector<Dist> act_dist(nb, Dist(na, 0.0));
    std::vector<double> rec_mass(nb, 0.0);
    for (int th = 0; th < nt; ++th) {
      on_path[rec[th]] = 1;
      act_dist[rec[th]][act[th]] += p_theta[th];
      rec_mass[rec[th]] += p_theta[th];
    }
    // Best-reply sets at on-path recommendations.
    std::vector<std::vector<int>> br(nb);
    bool viable = true;
    for (int bh = 0; bh < nb && viable; ++bh) {
      if (!on_path[bh]) continue;
      if (rec_mass[bh] <= kProbTol) {
        // recommendation used only by zero-probability states
        for (int b = 0; b < nb; ++b) br[bh].push_back(b);
        continue;
      }
      Dist d = act_dist[bh];
      for (double& v : d) v /= rec_mass[bh];
      std::vector<double> val(nb, 0.0);
      for (int b = 0; b < nb; ++b)
        for (int a = 0; a < na; ++a) val[b] += d[a] * game.u2(a, b);
      double best = *std::max_element(val.begin(), val.end());
      for (int b = 0; b < nb; ++b)
        if (val[b] >= best - kPayoffTol) br[bh].push_back(b);
    }
    if (viable) {
      // Enumerate player 2's on-path response choices within BR sets.
      std::vector<int> choice(nb, 0);
      for (;;) {
        std::vector<int> resp(nb, -1);
        for (int bh = 0; bh < nb; ++bh)
          if (on_path[bh]) resp[bh] = br[bh][choice[bh]];
        std::vector<double> v(nt);
        for (int th = 0; th < nt; ++th)
          v[th] = game.u1(th, act[th], resp[rec[th]]);
        // On-path deviations: any (on-path rec, action) pair.
        bool ok = true;
        for (int th = 0; th < nt && ok; ++th)
          for (int bh = 0; bh < nb && ok; ++bh) {
            if (!on_path[bh]) continue;
            for (int a = 0; a < na; ++a)
              if (game.u1(th, a, resp[bh]) > v[th] + kPayoffTol) {
                ok = false;
                break;
              }
          }
        // Off-path recommendations: a single deterrent response must hold
        // every state down to its equilibrium value.
        bool any_off_path = false;
        for (int bh = 0; bh < nb; ++bh)
          if (!on_path[bh]) any_off_path = true;
        int deterrent = -1;
        if (ok && any_off_path) {
          for (int b = 0; b < nb && deterrent < 0; ++b) {
            bool works = true;
            for (int th = 0; th < nt && works; ++th)
              for (int a = 0; a < na; ++a)
                if (game.u1(th, a, b) > v[th] + kPayoffTol) {
                  works = false;
                  break;
                }
            if (works) deterrent = b;
          }
          if (deterrent < 0) ok = false;
        }
        if (ok) {
          RecommendationEquilibrium eq;
          eq.recommendation = rec;
          eq.action = act;
          eq.response = resp;
          for (int bh = 0; bh < nb; ++bh)
            if (eq.response[bh] < 0) eq.response[bh] = deterrent >= 0 ? deterrent : 0;
          for (int th = 0; th < nt; ++th) eq.value += p_theta[th] * v[th];
          result.v_hat_1 = std::min(result.v_hat_1, eq.value);
          result.equilibria.push_back(std::move(eq));
        }
        int pos = 0;
        while (pos < nb) {
          if (!on_path[pos]) { ++pos; continue; }
          if (++choice[pos] < static_cast<int>(br[pos].size())) break;
          choice[pos++] = 0;
        }
        if (pos == nb) break;
      }
    }
    int pos = 0;
    while (pos < nt && ++code[pos] == na * nb) code[pos++] = 0;
    if (pos == nt) break;
  }
  return result;
}

// --- the constrained minimization defining v1' ----------------------------

struct V1PrimeWitness {
  bool feasible = false;
  std::vector<int> a_prime;      // subset of A in label order
  std::vector<Dist> beta;        // full map a -> distribution over B
  std::vector<int> announcement; // per theta: argmax over A' (label-order ties)
  double value = 0.0;
  // Worst keep-word one-shot deviation gain of the induced construction;
  // used for tie-breaking and for the delta threshold at gap zero.
  double max_stage_gain = 0.0;
};

namespace detail {

inline double v1prime_objective(const StageGame& game, const Dist& p_theta,
                                const std::vector<int>& a_prime,
                                const std::vector<Dist>& beta) {
  double total = 0.0;
  for (int th = 0; th < game.num_theta(); ++th) {
    double best = -kInf;
    for (int a : a_prime) {
      double v = 0.0;
      for (int b = 0; b < game.num_b(); ++b)
        v += beta[a][b] * game.u1(th, a, b);
      best = std::max(best, v);
    }
    total += p_theta[th] * best;
  }
  return total;
}

// Expected u1 of playing a against the mixture beta_a.
inline double mix_u1(const StageGame& game, int th, int a, const Dist& beta_a) {
  double v = 0.0;
  for (int b = 0; b < game.num_b(); ++b) v += beta_a[b] * game.u1(th, a, b);
  return v;
}

// On-path announcements and the worst deviation gain that keeps y = 1
// (and therefore cannot be punished) in the Theorem-2 construction.
inline void fill_construction(const StageGame& game, const Dist& p_theta,
                              V1PrimeWitness& w) {
  const int nt = game.num_theta(), na = game.num_a();
  w.announcement.assign(nt, w.a_prime[0]);
  int fallback = w.a_prime[0];  // response to announcements outside A'
  double worst = -kInf;
  for (int th = 0; th < nt; ++th) {
    double best = -kInf;
    for (int a : w.a_prime) {
      double v = mix_u1(game, th, a, w.beta[a]);
      if (v > best + kPayoffTol) {
        best = v;
        w.announcement[th] = a;
      }
    }
    for (int m = 0; m < na; ++m) {
      bool in_aprime =
          std::find(w.a_prime.begin(), w.a_prime.end(), m) != w.a_prime.end();
      const Dist& resp = in_aprime ? w.beta[m] : w.beta[fallback];
      worst = std::max(worst, mix_u1(game, th, m, resp) - best);
    }
  }
  w.max_stage_gain = worst;
}

}  // namespace detail

struct V1PrimeResult {
  V1PrimeWitness witness;           // minimum over all nonempty A' (incl. A)
  V1PrimeWitness witness_strict;    // minimum over strict subsets only
  bool any_feasible = false;
  double value() const { return witness.value; }
};

// Eq (5.2)-(5.3): minimize the expected best on-path payoff over action
// subsets A' and best-reply selections beta, subject to the value staying
// above the punishment level min(v1_min, v_hat_1).  Mixed selections are
// handled exactly by LP; when the unconstrained minimum violates the
// floor, the witness on the floor is recovered by convexity (line search
// between the LP minimizer and the best pure selection).
inline V1PrimeResult solve_v1_prime(const StageGame& game, const Dist& p_theta,
                                    double v1_min, double v_hat_1) {
  if (!std::isfinite(v1_min))
    throw InputError("solve_v1_prime: v1_min must be finite");
  check_desk_scale(game);
  const int nt = game.num_theta(), na = game.num_a(), nb = game.num_b();
  const double threshold = std::min(v1_min, v_hat_1);
  const double shift = 1.0 + std::max(std::abs(game.u1_min()), std::abs(game.u1_max()));

  std::vector<std::vector<int>> br(na);
  for (int a = 0; a < na; ++a) br[a] = best_reply_set_pure(game, a);
  // Default selection outside A': the best reply minimizing u1 in
  // expectation over theta (matches the pessimistic Stackelberg min).
  std::vector<Dist> default_beta(na, Dist(nb, 0.0));
  for (int a = 0; a < na; ++a) {
    int worst_b = br[a][0];
    double worst = kInf;
    for (int b : br[a]) {
      double v = 0.0;
      for (int th = 0; th < nt; ++th) v += p_theta[th] * game.u1(th, a, b);
      if (v < worst) { worst = v; worst_b = b; }
    }
    default_beta[a][worst_b] = 1.0;
  }

  V1PrimeResult result;
  auto consider = [&](V1PrimeWitness cand) {
    detail::fill_construction(game, p_theta, cand);
    auto better = [](const V1PrimeWitness& x, const V1PrimeWitness& y) {
      if (!y.feasible) return true;
      if (x.value < y.value - kPayoffTol) return true;
      if (x.value > y.value + kPayoffTol) return false;
      return x.max_stage_gain < y.max_stage_gain - kPayoffTol;
    };
    bool strict = static_cast<int>(cand.a_prime.size()) < na;
    if (better(cand, result.witness)) result.witness = cand;
    if (strict && better(cand, result.witness_strict)) result.witness_strict = cand;
    result.any_feasible = true;
  };

  for (unsigned mask = 1; mask < (1u << na); ++mask) {
    std::vector<int> a_prime;
    for (int a = 0; a < na; ++a)
      if (mask & (1u << a)) a_prime.push_back(a);

    // (a) exact minimum over mixed selections: LP over (t, beta).
    // Variables: t'_theta (shifted nonnegative), then beta_a(b) for
    // a in A', b in BR2(a).
    std::vector<std::pair<int, int>> bvars;  // (a, b)
    for (int a : a_prime)
      for (int b : br[a]) bvars.push_back({a, b});
    const std::size_t nv = nt + bvars.size();
    lp::Problem p(nv);
    {
      std::vector<double> obj(nv, 0.0);
      for (int th = 0; th < nt; ++th) obj[th] = p_theta[th];
      p.set_objective(obj);
    }
    for (std::size_t i = 0; i < a_prime.size(); ++i) {
      std::vector<double> row(nv, 0.0);
      for (std::size_t v = 0; v < bvars.size(); ++v)
        if (bvars[v].first == a_prime[i]) row[nt + v] = 1.0;
      p.add_eq(row, 1.0);
    }
    for (int th = 0; th < nt; ++th)
      for (int a : a_prime) {
        std::vector<double> row(nv, 0.0);
        row[th] = 1.0;
        for (std::size_t v = 0; v < bvars.size(); ++v)
          if (bvars[v].first == a)
            row[nt + v] = -game.u1(th, a, bvars[v].second);
        p.add_ge(row, shift);  // t_theta >= E u1(theta, a, beta(a))
      }
    auto lpres = p.solve();
    if (!lpres.ok())
      throw InternalError("solve_v1_prime: inner LP failed");
    double lp_min = lpres.value - shift;
    std::vector<Dist> beta_min = default_beta;
    for (int a : a_prime) std::fill(beta_min[a].begin(), beta_min[a].end(), 0.0);
    for (std::size_t v = 0; v < bvars.size(); ++v)
      beta_min[bvars[v].first][bvars[v].second] += lpres.x[nt + v];
    for (int a : a_prime) {
      double s = 0.0;
      for (double q : beta_min[a]) s += q;
      if (s <= kProbTol) beta_min[a] = default_beta[a];
      else for (double& q : beta_min[a]) q /= s;
    }

    // (b) maximum over pure selections (vertices of the product polytope).
    double pure_max = -kInf;
    std::vector<Dist> beta_max = default_beta;
    {
      std::vector<std::size_t> pick(a_prime.size(), 0);
      for (;;) {
        std::vector<Dist> beta = default_beta;
        for (std::size_t i = 0; i < a_prime.size(); ++i) {
          std::fill(beta[a_prime[i]].begin(), beta[a_prime[i]].end(), 0.0);
          beta[a_prime[i]][br[a_prime[i]][pick[i]]] = 1.0;
        }
        double obj = detail::v1prime_objective(game, p_theta, a_prime, beta);
        if (obj > pure_max) {
          pure_max = obj;
          beta_max = beta;
        }
        std::size_t pos = 0;
        while (pos < pick.size() && ++pick[pos] == br[a_prime[pos]].size())
          pick[pos++] = 0;
        if (pos == pick.size()) break;
      }
    }

    V1PrimeWitness cand;
    cand.a_prime = a_prime;
    if (lp_min >= threshold - kPayoffTol) {
      cand.feasible = true;
      cand.beta = beta_min;
      cand.value = lp_min;
    } else if (pure_max >= threshold - kPayoffTol) {
      // Intermediate value: objective is continuous along the segment from
      // the minimizing to the maximizing selection; bisect onto the floor.
      double lo = 0.0, hi = 1.0;
      std::vector<Dist> beta(na, Dist(nb, 0.0));
      for (int it = 0; it < 200; ++it) {
        double s = 0.5 * (lo + hi);
        for (int a = 0; a < na; ++a)
          for (int b = 0; b < nb; ++b)
            beta[a][b] = (1 - s) * beta_min[a][b] + s * beta_max[a][b];
        double obj = detail::v1prime_objective(game, p_theta, a_prime, beta);
        if (obj < threshold) lo = s; else hi = s;
        if (hi - lo < 1e-15) break;
      }
      for (int a = 0; a < na; ++a)
        for (int b = 0; b < nb; ++b)
          beta[a][b] = (1 - hi) * beta_min[a][b] + hi * beta_max[a][b];
      cand.feasible = true;
      cand.beta = beta;
      cand.value = detail::v1prime_objective(game, p_theta, a_prime, beta);
    } else {
      continue;  // A' infeasible
    }
    consider(std::move(cand));
  }
  return result;
}

// --- discount threshold for the Theorem-2 construction --------------------

// Conservative closed-form delta bound.  With a positive value gap above
// the punishment level, (1 - delta) * range <= delta * gap suffices for
// every punishable one-shot deviation; at gap zero the construction only
// works when keep-word deviations are already unprofitable, in which case
// any delta works.
inline double delta_threshold(const StageGame& game, const Dist& p_theta,
                              const V1PrimeWitness& witness,
                              double punish_value) {
  if (witness.value < punish_value - kPayoffTol)
    throw InputError("delta_threshold: v1' below the punishment value");
  double gap = witness.value - punish_value;
  double range = game.u1_max() - game.u1_min();
  if (gap > kPayoffTol) return range / (range + gap);
  // Gap zero: per-deviation check (keep-word deviations are delta-proof).
  V1PrimeWitness w = witness;
  detail::fill_construction(game, p_theta, w);
  if (w.max_stage_gain <= kPayoffTol) return 0.0;
  throw InputError(
      "delta_threshold: zero gap with a profitable keep-word deviation; "
      "no delta supports the construction");
}

}  // namespace repgame
