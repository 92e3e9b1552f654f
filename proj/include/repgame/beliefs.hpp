#pragma once

#include <cmath>
#include <vector>

#include "repgame/linprog.hpp"
#include "repgame/stage_game.hpp"

namespace repgame {

// Posterior over player 1's type; pi is the probability of the honest
// type, log_lr = log(pi / (1 - pi)) with +-inf at the endpoints.
struct BeliefState {
  double pi = 0.5;
  double log_lr = 0.0;

  static BeliefState from_pi(double pi) {
    if (pi < 0.0 || pi > 1.0) throw InputError("BeliefState: pi out of range");
    BeliefState b;
    b.pi = pi;
    if (pi <= 0.0) b.log_lr = -kInf;
    else if (pi >= 1.0) b.log_lr = kInf;
    else b.log_lr = std::log(pi / (1.0 - pi));
    return b;
  }
};

// One step of Bayes rule on the type posterior given the likelihood of the
// observed signal under each type.
inline BeliefState bayes_update_type(const BeliefState& belief, double lik_h,
                                     double lik_o) {
  if (lik_h < 0.0 || lik_h > 1.0 || lik_o < 0.0 || lik_o > 1.0)
    throw InputError("bayes_update_type: likelihood out of [0,1]");
  double denom = lik_h * belief.pi + lik_o * (1.0 - belief.pi);
  if (denom <= 0.0)
    throw InputError(
        "bayes_update_type: observed signal has zero probability under both "
        "types (inconsistent history)");
  BeliefState next;
  next.pi = lik_h * belief.pi / denom;
  if (next.pi <= 0.0) next.log_lr = -kInf;
  else if (next.pi >= 1.0) next.log_lr = kInf;
  else next.log_lr = belief.log_lr + std::log(lik_h / lik_o);
  return next;
}

// Period assessment from player 2's point of view: announcement
// probabilities and per-announcement keep-word probabilities.
struct Assessment {
  Dist alpha;     // distribution over announcements m
  Dist xi_of_m;   // P(a = m | m)
  double xi = 0.0;  // unconditional keep-word probability

  static Assessment make(Dist alpha, Dist xi_of_m) {
    if (alpha.size() != xi_of_m.size())
      throw InputError("Assessment: size mismatch");
    Assessment a;
    a.alpha = std::move(alpha);
    a.xi_of_m = std::move(xi_of_m);
    for (std::size_t m = 0; m < a.alpha.size(); ++m)
      a.xi += a.alpha[m] * a.xi_of_m[m];
    return a;
  }
};

// --- belief threshold lambda-bar ------------------------------------------

// Supremum of lambda for which some residual belief over A \ {a} leaves
// player 2 without a strictly preferred best reply against
// lambda * delta_a + (1 - lambda) * q.  For lambda above the returned
// value, some action of BR2(a) strictly beats every outside action no
// matter the residual.
inline double lambda_threshold_for_action(const StageGame& game, int a) {
  const int na = game.num_a(), nb = game.num_b();
  auto br = best_reply_set_pure(game, a);
  if (static_cast<int>(br.size()) == nb) return 0.0;  // vacuous
  std::vector<int> outside;
  for (int b = 0; b < nb; ++b)
    if (std::find(br.begin(), br.end(), b) == br.end()) outside.push_back(b);
  std::vector<int> others;
  for (int j = 0; j < na; ++j)
    if (j != a) others.push_back(j);
  if (others.empty()) return 0.0;  // belief is a point mass on a

  // Certificate: for each b in BR2(a), an outside action that weakly beats
  // it.  A residual defeats lambda iff some certificate is feasible; the
  // threshold is the largest lambda any certificate supports.
  double lam = 0.0;
  std::vector<std::size_t> pick(br.size(), 0);
  for (;;) {
    // Variables: lambda, then r_j = (1 - lambda) q_j for j != a.
    lp::Problem p(1 + others.size());
    std::vector<double> obj(1 + others.size(), 0.0);
    obj[0] = -1.0;  // maximize lambda
    p.set_objective(obj);
    std::vector<double> ones(1 + others.size(), 1.0);
    p.add_eq(ones, 1.0);  // lambda + sum r = 1
    for (std::size_t i = 0; i < br.size(); ++i) {
      int b = br[i], bp = outside[pick[i]];
      std::vector<double> row(1 + others.size(), 0.0);
      row[0] = game.u2(a, b) - game.u2(a, bp);
      for (std::size_t j = 0; j < others.size(); ++j)
        row[1 + j] = game.u2(others[j], b) - game.u2(others[j], bp);
      p.add_le(row, 0.0);
    }
    auto res = p.solve();
    if (res.ok()) lam = std::max(lam, -res.value);

    std::size_t pos = 0;
    while (pos < pick.size() && ++pick[pos] == outside.size()) pick[pos++] = 0;
    if (pos == pick.size()) break;
  }
  return lam;
}

struct LambdaBarResult {
  double lambda_bar = 0.0;
  bool degenerate = false;  // no lambda < 1 forces a strict best reply
};

// Threshold over the Stackelberg actions a*(theta).
inline LambdaBarResult lambda_bar(const StageGame& game,
                                  const std::vector<int>& a_star_actions) {
  LambdaBarResult r;
  std::vector<int> seen;
  for (int a : a_star_actions) {
    if (std::find(seen.begin(), seen.end(), a) != seen.end()) continue;
    seen.push_back(a);
    r.lambda_bar = std::max(r.lambda_bar, lambda_threshold_for_action(game, a));
  }
  if (r.lambda_bar >= 1.0 - 1e-9) {
    r.lambda_bar = 1.0;
    r.degenerate = true;
  }
  return r;
}

inline LambdaBarResult lambda_bar(const StageGame& game, const Dist& p_theta) {
  return lambda_bar(game, stackelberg(game, p_theta).a_star);
}

// --- KL separation and period bounds --------------------------------------

// D* = min over a != m of d(F* || xi* F* + (1 - xi*) F(.|a,m)).
inline double d_star(const SignalStructure& sig, double xi_star) {
  if (xi_star < 0.0 || xi_star >= 1.0 + kProbTol)
    throw InputError("d_star: xi_star out of range");
  Dist fstar = sig.f_star();
  for (int a = 0; a < sig.num_a; ++a) {
    Dist faa = sig.f_row(a, a);
    for (int y = 0; y < sig.num_y(); ++y)
      if (std::abs(faa[y] - fstar[y]) > 1e-9)
        throw InputError("d_star: Assumption 2(i) fails, no common F*");
  }
  double best = kInf;
  for (int a = 0; a < sig.num_a; ++a)
    for (int m = 0; m < sig.num_a; ++m) {
      if (a == m) continue;
      Dist mix = sig.f_row(a, m);
      for (int y = 0; y < sig.num_y(); ++y)
        mix[y] = xi_star * fstar[y] + (1.0 - xi_star) * mix[y];
      best = std::min(best, kl_divergence(fstar, mix));
    }
  return best;
}

// Bound on the expected number of bad periods, ceil(-log pi0 / D*).
inline long t_bar(double pi0, double d_star_value) {
  if (pi0 <= 0.0 || pi0 > 1.0) throw InputError("t_bar: pi0 out of (0,1]");
  if (d_star_value <= 0.0) throw InputError("t_bar: bound undefined at D* = 0");
  if (pi0 >= 1.0) return 0;
  if (d_star_value == kInf) return 0;
  return static_cast<long>(std::ceil(-std::log(pi0) / d_star_value));
}

// Payoff floor for the honest announce-the-Stackelberg-action strategy.
inline double bound_3_6(double v1_star, double u1_lowest, double delta,
                        double epsilon, double min_p_theta, long T_bar) {
  if (min_p_theta <= 0.0 || epsilon < 0.0 || epsilon / min_p_theta > 1.0)
    throw InputError("bound_3_6: epsilon exceeds the smallest state mass");
  if (delta < 0.0 || delta > 1.0) throw InputError("bound_3_6: delta out of range");
  double frac = epsilon / min_p_theta;
  double inner = (1.0 - frac) * v1_star + frac * u1_lowest;
  double dT = std::pow(delta, static_cast<double>(T_bar));
  return dT * inner + (1.0 - dT) * u1_lowest;
}

// Bounded-memory analogues (Corollary 1).
struct XiHatResult {
  double xi_hat = 0.0;
  bool degenerate = false;  // rho_lower = 0 with K > 0
};

inline XiHatResult xi_hat(double rho_lower, int K, double xi_star) {
  if (K < 0 || rho_lower < 0.0 || rho_lower > 1.0 || xi_star < 0.0 ||
      xi_star > 1.0)
    throw InputError("xi_hat: inputs out of range");
  XiHatResult r;
  r.xi_hat = 1.0 - std::pow(rho_lower, K) * (1.0 - xi_star);
  r.degenerate = (rho_lower == 0.0 && K > 0);
  return r;
}

inline long t_hat(double pi0, double d_hat) { return t_bar(pi0, d_hat); }

// --- Corollary 3 drift constants ------------------------------------------

struct Corollary3Constants {
  double alpha = 0.0;  // lower bound on the log-likelihood drift, nu = 0
  double beta = 0.0;   // bound on the downward drift, nu = 1
  double good_fraction = 1.0;  // alpha / (alpha + beta)
  bool degenerate = false;     // alpha <= 0: rho too large relative to eta
};

inline Corollary3Constants corollary3_constants(double rho, double eta,
                                                double xi_threshold) {
  if (rho < 0.0 || rho >= 1.0 || eta <= 0.0 || eta >= 1.0 ||
      xi_threshold <= 0.0 || xi_threshold >= 1.0)
    throw InputError("corollary3_constants: parameters out of range");
  Corollary3Constants c;
  c.beta = bernoulli_kl(1.0 - rho, 1.0 - eta * rho);
  c.alpha = bernoulli_kl(1.0 - rho, 1.0 - eta * (1.0 - xi_threshold)) - c.beta;
  if (c.alpha <= 0.0) c.degenerate = true;
  double denom = c.alpha + c.beta;
  c.good_fraction = denom > 0.0 ? c.alpha / denom : 1.0;
  return c;
}

}  // namespace repgame
