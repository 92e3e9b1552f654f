#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "repgame/beliefs.hpp"
#include "repgame/solvers.hpp"
#include "repgame/stage_game.hpp"

namespace repgame {

// Markov stage policy for player 1: announcement distribution per (theta,
// omega) and action distribution per (theta, omega, m).  Action support must
// stay inside omega; honest tables also keep the word whenever m is feasible.
struct MarkovPolicy {
  int num_theta = 0;
  int num_a = 0;
  std::vector<double> ann;  // (theta*nmask + mask)*na + m
  std::vector<double> act;  // ((theta*nmask + mask)*na + m)*na + a

  int nmask() const { return 1 << num_a; }

  const double* ann_row(int theta, SubsetMask mask) const {
    return ann.data() + (static_cast<std::size_t>(theta) * nmask() + mask) * num_a;
  }
  const double* act_row(int theta, SubsetMask mask, int m) const {
    return act.data() +
           ((static_cast<std::size_t>(theta) * nmask() + mask) * num_a + m) *
               num_a;
  }
  double* ann_row(int theta, SubsetMask mask) {
    return ann.data() + (static_cast<std::size_t>(theta) * nmask() + mask) * num_a;
  }
  double* act_row(int theta, SubsetMask mask, int m) {
    return act.data() +
           ((static_cast<std::size_t>(theta) * nmask() + mask) * num_a + m) *
               num_a;
  }

  static MarkovPolicy zeros(int num_theta, int num_a) {
    MarkovPolicy p;
    p.num_theta = num_theta;
    p.num_a = num_a;
    p.ann.assign(static_cast<std::size_t>(num_theta) * p.nmask() * num_a, 0.0);
    p.act.assign(
        static_cast<std::size_t>(num_theta) * p.nmask() * num_a * num_a, 0.0);
    return p;
  }

  // Checks distribution rows and action feasibility on every positive-mass
  // (theta, omega) state; honest additionally requires a = m when m is
  // feasible.
  void validate(const Environment& env, bool honest) const {
    for (int th = 0; th < num_theta; ++th)
      for (SubsetMask mask = 1; mask < nmask(); ++mask) {
        if (env.joint_p[th * nmask() + mask] <= 0.0) continue;
        const double* ar = ann_row(th, mask);
        double s = 0.0;
        for (int m = 0; m < num_a; ++m) s += ar[m];
        if (std::abs(s - 1.0) > 1e-9)
          throw InputError("MarkovPolicy: announcement row not a distribution");
        for (int m = 0; m < num_a; ++m) {
          if (ar[m] <= 0.0) continue;
          const double* xr = act_row(th, mask, m);
          double sa = 0.0;
          for (int a = 0; a < num_a; ++a) {
            sa += xr[a];
            if (xr[a] > 0.0 && !(mask & (SubsetMask{1} << a)))
              throw InputError("MarkovPolicy: action outside omega");
          }
          if (std::abs(sa - 1.0) > 1e-9)
            throw InputError("MarkovPolicy: action row not a distribution");
          if (honest && (mask & (SubsetMask{1} << m)) && xr[m] < 1.0 - 1e-12)
            throw InputError("MarkovPolicy: honest table breaks its word");
        }
      }
  }
};

// Player-1 policy as belief-indexed regimes; the table with the largest
// pi_min not exceeding the current public belief is active.  A single
// regime with pi_min = 0 is an ordinary Markov policy.
struct Player1Policy {
  struct Regime {
    double pi_min = 0.0;
    MarkovPolicy table;
  };
  std::vector<Regime> regimes;  // sorted by pi_min ascending, first at 0
  bool honest = false;

  const MarkovPolicy& active(double pi) const {
    std::size_t k = 0;
    for (std::size_t i = 1; i < regimes.size(); ++i)
      if (pi >= regimes[i].pi_min) k = i;
    return regimes[k].table;
  }
  int active_index(double pi) const {
    int k = 0;
    for (std::size_t i = 1; i < regimes.size(); ++i)
      if (pi >= regimes[i].pi_min) k = static_cast<int>(i);
    return k;
  }

  void validate(const Environment& env) const {
    if (regimes.empty()) throw InputError("Player1Policy: no regimes");
    if (regimes.front().pi_min != 0.0)
      throw InputError("Player1Policy: first regime must start at pi = 0");
    for (std::size_t i = 1; i < regimes.size(); ++i)
      if (regimes[i].pi_min <= regimes[i - 1].pi_min)
        throw InputError("Player1Policy: regime thresholds not increasing");
    for (const auto& r : regimes) r.table.validate(env, honest);
  }
};

namespace detail {

inline void fill_uniform_over_mask(double* row, int n, SubsetMask mask) {
  int cnt = 0;
  for (int i = 0; i < n; ++i)
    if (mask & (SubsetMask{1} << i)) ++cnt;
  for (int i = 0; i < n; ++i)
    row[i] = (mask & (SubsetMask{1} << i)) ? 1.0 / cnt : 0.0;
}

}  // namespace detail

// The honest type's strategy from Theorem 1: announce a*(theta) when
// feasible, otherwise uniform over omega; always keep the word.
inline Player1Policy honest_star_policy(const StageGame& game,
                                        const std::vector<int>& a_star_map) {
  const int nt = game.num_theta(), na = game.num_a();
  if (static_cast<int>(a_star_map.size()) != nt)
    throw InputError("honest_star_policy: a_star_map not total on Theta");
  MarkovPolicy t = MarkovPolicy::zeros(nt, na);
  for (int th = 0; th < nt; ++th)
    for (SubsetMask mask = 1; mask < t.nmask(); ++mask) {
      double* ar = t.ann_row(th, mask);
      if (mask & (SubsetMask{1} << a_star_map[th]))
        ar[a_star_map[th]] = 1.0;
      else
        detail::fill_uniform_over_mask(ar, na, mask);
      for (int m = 0; m < na; ++m) {
        double* xr = t.act_row(th, mask, m);
        if (mask & (SubsetMask{1} << m)) xr[m] = 1.0;
        else detail::fill_uniform_over_mask(xr, na, mask);
      }
    }
  Player1Policy p;
  p.honest = true;
  p.regimes.push_back({0.0, std::move(t)});
  return p;
}

// Scripted opportunistic baseline: announce like honest-star, keep the word
// with probability p_keep, otherwise play the stage-greedy action against
// the trusting response to m (the min-u1 element of BR2(m)).
inline Player1Policy myopic_greedy_policy(const StageGame& game,
                                          const std::vector<int>& a_star_map,
                                          double p_keep) {
  if (p_keep < 0.0 || p_keep > 1.0)
    throw InputError("myopic_greedy_policy: p_keep out of range");
  const int nt = game.num_theta(), na = game.num_a();
  Player1Policy base = honest_star_policy(game, a_star_map);
  MarkovPolicy t = base.regimes[0].table;
  for (int th = 0; th < nt; ++th)
    for (SubsetMask mask = 1; mask < t.nmask(); ++mask)
      for (int m = 0; m < na; ++m) {
        if (!(mask & (SubsetMask{1} << m))) continue;
        auto br = best_reply_set_pure(game, m);
        int b_trust = br[0];
        for (int b : br)
          if (game.u1(th, m, b) < game.u1(th, m, b_trust)) b_trust = b;
        int greedy = -1;
        for (int a = 0; a < na; ++a) {
          if (!(mask & (SubsetMask{1} << a))) continue;
          if (greedy < 0 || game.u1(th, a, b_trust) > game.u1(th, greedy, b_trust))
            greedy = a;
        }
        double* xr = t.act_row(th, mask, m);
        std::fill(xr, xr + na, 0.0);
        xr[m] += p_keep;
        xr[greedy] += 1.0 - p_keep;
      }
  Player1Policy p;
  p.honest = false;
  p.regimes.push_back({0.0, std::move(t)});
  return p;
}

// Opportunistic copy of the honest strategy (keeps the word).
inline Player1Policy mimic_honest_policy(const StageGame& game,
                                         const std::vector<int>& a_star_map) {
  Player1Policy p = honest_star_policy(game, a_star_map);
  p.honest = false;
  return p;
}

// Builds reputation while the public belief is below pi_switch, milks it
// above: mimic-honest regime below, myopic-greedy regime at and above.
inline Player1Policy threshold_milking_policy(const StageGame& game,
                                              const std::vector<int>& a_star_map,
                                              double pi_switch, double p_keep_high) {
  if (pi_switch <= 0.0 || pi_switch >= 1.0)
    throw InputError("threshold_milking_policy: pi_switch out of (0,1)");
  Player1Policy p = mimic_honest_policy(game, a_star_map);
  Player1Policy high = myopic_greedy_policy(game, a_star_map, p_keep_high);
  p.regimes.push_back({pi_switch, std::move(high.regimes[0].table)});
  return p;
}

// Announcement trembles of section 4: each m gets probability at least eta
// at every information set.
inline void tremble_row(double* row, int n, double eta) {
  for (int i = 0; i < n; ++i) row[i] = (1.0 - eta * n) * row[i] + eta;
}

inline Player1Policy tremble_wrap(Player1Policy policy, double eta) {
  if (eta < 0.0) throw InputError("tremble_wrap: negative eta");
  if (policy.regimes.empty()) throw InputError("tremble_wrap: empty policy");
  int na = policy.regimes[0].table.num_a;
  if (eta * na > 1.0 + kProbTol)
    throw InputError("tremble_wrap: eta * |A| exceeds 1");
  for (auto& r : policy.regimes) {
    MarkovPolicy& t = r.table;
    for (int th = 0; th < t.num_theta; ++th)
      for (SubsetMask mask = 1; mask < t.nmask(); ++mask)
        tremble_row(t.ann_row(th, mask), na, eta);
  }
  if (eta > 0.0) policy.honest = false;  // trembles can announce outside omega
  return policy;
}

// --- bound-mode responder --------------------------------------------------

struct Player2Decision {
  int b = 0;
  bool trusted = false;
};

// The worst-case responder of Theorem 1's proof: trusts the announcement
// (pessimistic element of BR2(m)) when its credibility exceeds lambda_bar,
// otherwise plays the action minimizing player 1's expected payoff against
// m.  The boundary xi = lambda_bar falls on the adversarial side.
struct BoundModePlayer2 {
  double lambda_bar = 0.0;
  std::vector<int> b_trust;  // per announcement m
  std::vector<int> b_adv;    // per announcement m

  Player2Decision respond(int m, double xi_m) const {
    Player2Decision d;
    d.trusted = xi_m > lambda_bar;
    d.b = d.trusted ? b_trust[m] : b_adv[m];
    return d;
  }
};

inline BoundModePlayer2 make_bound_mode_player2(const StageGame& game,
                                                const Dist& p_theta,
                                                double lambda_bar_value) {
  const int na = game.num_a(), nb = game.num_b(), nt = game.num_theta();
  BoundModePlayer2 r;
  r.lambda_bar = lambda_bar_value;
  r.b_trust.resize(na);
  r.b_adv.resize(na);
  for (int m = 0; m < na; ++m) {
    auto eu1 = [&](int b) {
      double v = 0.0;
      for (int th = 0; th < nt; ++th) v += p_theta[th] * game.u1(th, m, b);
      return v;
    };
    auto br = best_reply_set_pure(game, m);
    int bt = br[0];
    for (int b : br)
      if (eu1(b) < eu1(bt)) bt = b;
    r.b_trust[m] = bt;
    int ba = 0;
    for (int b = 1; b < nb; ++b)
      if (eu1(b) < eu1(ba)) ba = b;
    r.b_adv[m] = ba;
  }
  return r;
}

// --- Theorem 2 profile -----------------------------------------------------

// Two-regime automaton: on path both types announce m*(theta) and keep the
// word, player 2 plays beta(m) after on-path announcements and beta of the
// first element of A' after outside announcements; any y = 0 triggers the
// punishment regime where the auxiliary-game equilibrium is played forever.
struct Theorem2Profile {
  std::vector<int> m_star;     // per theta, the same for both types
  std::vector<Dist> beta;      // per announcement m, response in the on-path regime
  AuxEquilibrium punish;       // stage equilibrium of the punishment regime
  double on_value = 0.0;       // expected on-path stage (= continuation) payoff
  double pun_value = 0.0;
  std::vector<double> on_value_theta;
};

inline Theorem2Profile theorem2_profile(const StageGame& game,
                                        const Dist& p_theta,
                                        const V1PrimeWitness& witness,
                                        const AuxEquilibrium& punish) {
  if (!witness.feasible) throw InputError("theorem2_profile: infeasible witness");
  const int nt = game.num_theta(), na = game.num_a(), nb = game.num_b();
  Theorem2Profile prof;
  prof.punish = punish;

  auto stage_u1 = [&](int th, int a, const Dist& mix) {
    double v = 0.0;
    for (int b = 0; b < nb; ++b) v += mix[b] * game.u1(th, a, b);
    return v;
  };

  int a0 = witness.a_prime.front();
  prof.beta.assign(na, witness.beta[a0]);
  for (int a : witness.a_prime) prof.beta[a] = witness.beta[a];

  prof.m_star.resize(nt);
  prof.on_value_theta.resize(nt);
  for (int th = 0; th < nt; ++th) {
    int best = witness.a_prime.front();
    for (int a : witness.a_prime)
      if (stage_u1(th, a, prof.beta[a]) >
          stage_u1(th, best, prof.beta[best]) + kPayoffTol)
        best = a;
    prof.m_star[th] = best;
    prof.on_value_theta[th] = stage_u1(th, best, prof.beta[best]);
    prof.on_value += p_theta[th] * prof.on_value_theta[th];
  }

  for (int th = 0; th < nt; ++th)
    for (int a = 0; a < na; ++a)
      for (int b = 0; b < nb; ++b)
        prof.pun_value += p_theta[th] * punish.sigma1[th][a] *
                          punish.sigma2[b] * game.u1(th, a, b);
  if (prof.pun_value > prof.on_value + kPayoffTol)
    throw InputError(
        "theorem2_profile: punishment value exceeds the on-path value");
  return prof;
}

}  // namespace repgame
