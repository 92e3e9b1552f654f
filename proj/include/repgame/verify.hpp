#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "repgame/beliefs.hpp"
#include "repgame/quality.hpp"
#include "repgame/simulator.hpp"
#include "repgame/solvers.hpp"
#include "repgame/strategies.hpp"

namespace repgame {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  long sample_size = 0;
  std::string witness;  // set when the check fails
};

struct VerificationReport {
  std::vector<CheckResult> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  CheckResult& add(std::string name) {
    checks.push_back({});
    checks.back().name = std::move(name);
    return checks.back();
  }
};

// --- Theorem 2: Nash verification of the two-regime automaton ---------------

struct NashVerification {
  VerificationReport report;
  double on_value = 0.0;
  double min_delta = 0.0;  // smallest delta at which every deviation check passes
};

// One-shot deviation checks for the profile of Theorem 2.  Continuation
// values are regime-constant (theta is i.i.d.), so the regime-value
// recursion is exact and one-shot deviations characterize Nash here.
inline NashVerification verify_nash_profile(const Theorem2Profile& prof,
                                            const StageGame& game,
                                            const Dist& p_theta, double delta,
                                            double tol = 1e-9) {
  if (delta < 0.0 || delta >= 1.0)
    throw InputError("verify_nash_profile: delta out of [0,1)");
  const int nt = game.num_theta(), na = game.num_a(), nb = game.num_b();
  NashVerification out;
  out.on_value = prof.on_value;

  auto mix_u1 = [&](int th, int a, const Dist& mix) {
    double v = 0.0;
    for (int b = 0; b < nb; ++b) v += mix[b] * game.u1(th, a, b);
    return v;
  };
  auto mix_u2 = [&](const Dist& over_a, int b) {
    double v = 0.0;
    for (int a = 0; a < na; ++a) v += over_a[a] * game.u2(a, b);
    return v;
  };

  // (a) player 2 myopic optimality, on-path regime: after an on-path
  // announcement both types play it for sure, so support(beta(m)) must be
  // inside BR2(m).
  {
    auto& c = out.report.add("p2_on_path_optimality");
    c.pass = true;
    for (int th = 0; th < nt; ++th) {
      int m = prof.m_star[th];
      auto br = best_reply_set_pure(game, m);
      for (int b = 0; b < nb; ++b) {
        if (prof.beta[m][b] <= kProbTol) continue;
        if (std::find(br.begin(), br.end(), b) == br.end()) {
          c.pass = false;
          c.witness = "announcement " + game.a_labels[m] + " answered by " +
                      game.b_labels[b] + " outside BR2";
        }
      }
    }
  }

  // (b) player 2 optimality in the punishment regime (stage equilibrium).
  {
    auto& c = out.report.add("p2_punishment_optimality");
    c.pass = true;
    Dist over_a(na, 0.0);
    for (int th = 0; th < nt; ++th)
      for (int a = 0; a < na; ++a)
        over_a[a] += p_theta[th] * prof.punish.sigma1[th][a];
    double best = -kInf;
    for (int b = 0; b < nb; ++b) best = std::max(best, mix_u2(over_a, b));
    for (int b = 0; b < nb; ++b) {
      if (prof.punish.sigma2[b] <= kProbTol) continue;
      if (mix_u2(over_a, b) < best - 1e-7) {
        c.pass = false;
        c.witness = "punishment response " + game.b_labels[b] + " suboptimal";
      }
    }
  }

  // (c) player 1 one-shot deviations.  W_on and W_pun are the ex-ante
  // regime values; any y = 0 switches to punishment forever.
  double W_on = prof.on_value, W_pun = prof.pun_value;
  double cont_loss = delta * (W_on - W_pun);
  double worst_keep_gain = -kInf, worst_break_gain = -kInf;
  std::string keep_wit, break_wit;
  double min_delta = 0.0;
  bool dev_pass = true;
  std::string dev_wit;
  for (int th = 0; th < nt; ++th) {
    double on_stage = mix_u1(th, prof.m_star[th], prof.beta[prof.m_star[th]]);
    for (int m = 0; m < na; ++m) {
      // keep-word deviation: announce m, play m, stay on path
      double gk = mix_u1(th, m, prof.beta[m]) - on_stage;
      if (gk > worst_keep_gain) {
        worst_keep_gain = gk;
        keep_wit = "theta " + game.theta_labels[th] + ", announce-and-keep " +
                   game.a_labels[m];
      }
      if ((1.0 - delta) * gk > tol) {
        dev_pass = false;
        dev_wit = keep_wit;
      }
      // break-word deviation: announce m, play a != m, punished afterwards
      for (int a = 0; a < na; ++a) {
        if (a == m) continue;
        double gb = mix_u1(th, a, prof.beta[m]) - on_stage;
        if (gb > worst_break_gain) {
          worst_break_gain = gb;
          break_wit = "theta " + game.theta_labels[th] + ", announce " +
                      game.a_labels[m] + " play " + game.a_labels[a];
        }
        if ((1.0 - delta) * gb - cont_loss > tol) {
          dev_pass = false;
          dev_wit = break_wit;
        }
        if (gb > 0.0 && W_on - W_pun > 0.0)
          min_delta = std::max(min_delta, gb / (gb + (W_on - W_pun)));
      }
    }
    // punishment-regime stage deviations
    double pun_stage = 0.0;
    for (int a = 0; a < na; ++a)
      pun_stage += prof.punish.sigma1[th][a] * mix_u1(th, a, prof.punish.sigma2);
    for (int a = 0; a < na; ++a)
      if (mix_u1(th, a, prof.punish.sigma2) - pun_stage > 1e-7) {
        dev_pass = false;
        dev_wit = "punishment regime, theta " + game.theta_labels[th] +
                  " deviates to " + game.a_labels[a];
      }
  }
  if (worst_keep_gain > tol) min_delta = 1.0;  // keep-word gain is delta-proof

  auto& c = out.report.add("p1_one_shot_deviations");
  c.pass = dev_pass;
  c.measured = std::max(worst_keep_gain, worst_break_gain);
  c.tolerance = tol;
  if (!dev_pass) c.witness = dev_wit;
  out.min_delta = min_delta;

  auto& cv = out.report.add("on_path_value_matches");
  cv.measured = prof.on_value;
  cv.pass = true;
  return out;
}

// --- Theorem 1 / Corollary 1 bound dominance -------------------------------

inline VerificationReport check_theorem1_bound(const SimResult& sim,
                                               double bound_value,
                                               double t_bar_value,
                                               double pi0) {
  VerificationReport rep;
  auto& cp = rep.add("payoff_above_3_6");
  cp.measured = sim.mean_payoff;
  cp.bound = bound_value;
  cp.tolerance = 3.0 * sim.se_payoff;
  cp.sample_size = sim.num_seeds;
  cp.pass = sim.mean_payoff >= bound_value - cp.tolerance;
  if (!cp.pass) cp.witness = "mean payoff below bound";

  auto& cb = rep.add("bad_periods_below_t_bar");
  cb.measured = sim.mean_bad;
  cb.bound = t_bar_value;
  cb.tolerance = 3.0 * sim.se_bad;
  cb.sample_size = sim.num_seeds;
  cb.pass = pi0 >= 1.0 ? sim.mean_bad == 0.0
                       : sim.mean_bad <= t_bar_value + cb.tolerance;
  if (!cb.pass) cb.witness = "bad-period mean above the bound";
  return rep;
}

// --- Corollary 2: quality variant -------------------------------------------

inline VerificationReport check_corollary2(const SimResult& sim,
                                           double v_star_star, double tol) {
  VerificationReport rep;
  auto& c = rep.add("quality_payoff_near_v_star_star");
  c.measured = sim.mean_payoff;
  c.bound = v_star_star;
  c.tolerance = tol;
  c.sample_size = sim.num_seeds;
  c.pass = sim.mean_payoff >= v_star_star - tol;
  if (!c.pass) c.witness = "payoff below v** - tol";
  return rep;
}

// The section-4 counterexample: deterministic quality, both types exert low
// effort and announce truthfully, player 2 never trusts.  Nash for every
// delta because all deviations keep the response at the adversarial action.
inline VerificationReport verify_quality_counterexample(const QualityGame& q,
                                                        int low_effort,
                                                        int never_trust_b) {
  VerificationReport rep;
  auto& cb = rep.add("counterexample_response_is_stage_br");
  cb.pass = true;
  // never_trust_b must be a best reply to the on-path announced quality
  for (int x = 0; x < q.num_x(); ++x) {
    if (q.g(x, low_effort) <= 0.0) continue;
    auto br = q.best_reply_set_x(x);
    if (std::find(br.begin(), br.end(), never_trust_b) == br.end()) {
      cb.pass = false;
      cb.witness = "response not a best reply to announced " + q.x_labels[x];
    }
  }
  double on_value = 0.0;
  for (int x = 0; x < q.num_x(); ++x)
    on_value += q.g(x, low_effort) * q.u1(low_effort, never_trust_b);

  auto& c1 = rep.add("counterexample_no_profitable_effort");
  c1.pass = true;
  c1.bound = on_value;
  for (int a = 0; a < q.num_a(); ++a) {
    // response is never_trust_b regardless of effort or announcement
    double v = q.u1(a, never_trust_b);
    c1.measured = std::max(c1.measured, v - on_value);
    if (v > on_value + kPayoffTol) {
      c1.pass = false;
      c1.witness = "effort " + q.a_labels[a] + " profitable";
    }
  }
  auto& cv = rep.add("counterexample_on_path_value");
  cv.measured = on_value;
  cv.pass = true;
  return rep;
}

// --- Appendix E: drift, concentration, and the (C.6) identity ---------------

struct AppendixEInputs {
  std::vector<Trajectory> trajectories;  // preannounce runs with logged rows
  Corollary3Constants constants;
  double delta = 0.0;
  double expected_Z = 0.0;     // analytic per-period drift of the scenario
  double nu_mass_slack = 0.05; // epsilon-hat of the (C.4) comparison
};

namespace detail {

inline void pooled_mean_se(const std::vector<double>& xs, double& mean,
                           double& se) {
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= xs.empty() ? 1 : xs.size();
  double q = 0.0;
  for (double x : xs) q += (x - mean) * (x - mean);
  se = xs.size() > 1 ? std::sqrt(q / (xs.size() - 1) / xs.size()) : 0.0;
}

}  // namespace detail

inline VerificationReport check_appendixE(const AppendixEInputs& in) {
  VerificationReport rep;
  if (in.trajectories.empty() || in.trajectories.front().rows.empty())
    throw InputError("check_appendixE: trajectories without logged rows");
  const auto& cst = in.constants;

  // (a) per-period drift against the Corollary 3 constants
  std::vector<double> z_good, z_bad;
  double z_min = kInf, z_max = -kInf;
  for (const auto& tr : in.trajectories)
    for (const auto& row : tr.rows) {
      (row.nu == 1 ? z_good : z_bad).push_back(row.Z);
      z_min = std::min(z_min, row.Z);
      z_max = std::max(z_max, row.Z);
    }
  {
    auto& c = rep.add("drift_nu1_above_minus_beta");
    double m, se;
    detail::pooled_mean_se(z_good, m, se);
    c.measured = m;
    c.bound = -cst.beta;
    c.tolerance = 3.0 * se;
    c.sample_size = static_cast<long>(z_good.size());
    c.pass = !z_good.empty() && m >= -cst.beta - c.tolerance;
    if (!c.pass) c.witness = "good-period drift below -beta";
  }
  {
    auto& c = rep.add("drift_nu0_above_alpha");
    double m, se;
    detail::pooled_mean_se(z_bad, m, se);
    c.measured = m;
    c.bound = cst.alpha;
    c.tolerance = 3.0 * se;
    c.sample_size = static_cast<long>(z_bad.size());
    c.pass = !z_bad.empty() && m >= cst.alpha - c.tolerance;
    if (!c.pass) c.witness = "bad-period drift below alpha";
  }

  // (b) compensated martingale: mean increment of l-tilde is zero, and the
  // Azuma tail at the horizon respects the bound.
  {
    auto& c = rep.add("compensated_martingale_mean_zero");
    std::vector<double> inc;
    for (const auto& tr : in.trajectories)
      for (const auto& row : tr.rows) inc.push_back(row.Z - in.expected_Z);
    double m, se;
    detail::pooled_mean_se(inc, m, se);
    c.measured = m;
    c.bound = 0.0;
    c.tolerance = 3.0 * se;
    c.sample_size = static_cast<long>(inc.size());
    c.pass = std::abs(m) <= c.tolerance;
    if (!c.pass) c.witness = "martingale increments drift from zero";
  }
  double C = z_max - z_min;
  long T = static_cast<long>(in.trajectories.front().rows.size());
  for (double mult : {0.5, 1.0, 2.0}) {
    auto& c = rep.add("azuma_tail_x" + std::to_string(mult));
    double eps1 = mult * std::sqrt(static_cast<double>(T)) * C;
    int hits = 0;
    for (const auto& tr : in.trajectories) {
      double lt = 0.0;
      for (const auto& row : tr.rows) lt += row.Z - in.expected_Z;
      if (lt >= eps1) ++hits;
    }
    double freq = static_cast<double>(hits) / in.trajectories.size();
    double se = std::sqrt(freq * (1.0 - freq) /
                          static_cast<double>(in.trajectories.size()));
    c.measured = freq;
    c.bound = std::exp(-eps1 * eps1 / (2.0 * T * C * C));
    c.tolerance = 3.0 * se;
    c.sample_size = static_cast<long>(in.trajectories.size());
    c.pass = freq <= c.bound + c.tolerance;
    if (!c.pass) c.witness = "Azuma tail frequency above the bound";
  }

  // (c) Claim 1 fraction and the (C.4) discounted nu mass
  {
    auto& c = rep.add("claim1_nu_fraction");
    std::vector<double> fr;
    for (const auto& tr : in.trajectories)
      fr.push_back(static_cast<double>(tr.nu_one_count) / tr.rows.size());
    double m, se;
    detail::pooled_mean_se(fr, m, se);
    c.measured = m;
    c.bound = cst.good_fraction - in.nu_mass_slack;
    c.tolerance = 3.0 * se;
    c.sample_size = static_cast<long>(fr.size());
    c.pass = m >= c.bound - c.tolerance;
    if (!c.pass) c.witness = "nu fraction below alpha/(alpha+beta) - eps";
  }
  {
    auto& c = rep.add("c4_discounted_nu_mass");
    std::vector<double> mass;
    for (const auto& tr : in.trajectories) mass.push_back(tr.disc_nu_mass);
    double m, se;
    detail::pooled_mean_se(mass, m, se);
    c.measured = m;
    c.bound = cst.good_fraction - in.nu_mass_slack;
    c.tolerance = 3.0 * se;
    c.sample_size = static_cast<long>(mass.size());
    c.pass = m >= c.bound - c.tolerance;
    if (!c.pass) c.witness = "discounted nu mass below the (C.4) bound";
  }

  // (d) the Abel-summation identity of (C.6), exact on logged data with the
  // finite-horizon boundary term
  {
    auto& c = rep.add("c6_identity_exact");
    c.pass = true;
    double worst = 0.0;
    double d = in.delta;
    for (const auto& tr : in.trajectories) {
      long Tt = static_cast<long>(tr.rows.size());
      double lhs = 0.0, rhs = 0.0, S = 0.0, w = 1.0;
      for (long t = 0; t < Tt; ++t) {
        double nu = tr.rows[t].nu;
        lhs += (1.0 - d) * w * nu;
        S += nu;
        if (t < Tt - 1) rhs += (1.0 - d) * (1.0 - d) * w * S;
        w *= d;
      }
      rhs += (1.0 - d) * std::pow(d, static_cast<double>(Tt - 1)) * S;
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    c.measured = worst;
    c.tolerance = 1e-12;
    c.pass = worst <= 1e-12;
    if (!c.pass) c.witness = "identity residual above 1e-12";
  }

  // (e) fitted l*: the largest log-likelihood ratio seen in a bad period;
  // every period above it must be good.
  {
    auto& c = rep.add("l_star_separates_nu");
    double l_star = -kInf;
    for (const auto& tr : in.trajectories)
      for (const auto& row : tr.rows)
        if (row.nu == 0) l_star = std::max(l_star, row.l);
    c.measured = l_star;
    c.pass = true;
    for (const auto& tr : in.trajectories)
      for (const auto& row : tr.rows)
        if (row.l > l_star && row.nu != 1) {
          c.pass = false;
          c.witness = "period above the fitted l* with nu = 0";
        }
  }
  return rep;
}

}  // namespace repgame
