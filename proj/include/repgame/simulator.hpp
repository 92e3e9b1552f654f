#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <utility>
#include <vector>

#include "repgame/beliefs.hpp"
#include "repgame/quality.hpp"
#include "repgame/stage_game.hpp"
#include "repgame/strategies.hpp"

namespace repgame {

enum class Variant {
  baseline,
  bounded_memory_z,
  quality_announcement,
  preannounce_feasibility,
};

enum class P1Type { honest, opportunistic, prior_draw };

struct SimConfig {
  double delta = 0.99;
  long horizon = 0;  // 0: derived so the truncation bound is below trunc_tol
  int num_seeds = 2;
  std::uint64_t master_seed = 1;
  Variant variant = Variant::baseline;
  P1Type p1_type = P1Type::honest;
  double pi0 = 0.5;
  double eta = 0.0;          // announcement tremble (preannounce variant)
  int memory_K = 0;          // bounded-memory window
  double xi_threshold = 0.5; // the xi of Corollary 3's nu_t definition
  double trunc_tol = 1e-4;   // requested truncation error as payoff-range fraction
  bool log_rows = false;

  void validate() const {
    if (delta < 0.0 || delta >= 1.0) throw InputError("SimConfig: delta out of [0,1)");
    if (pi0 < 0.0 || pi0 > 1.0) throw InputError("SimConfig: pi0 out of range");
    if (horizon < 0 || num_seeds < 1) throw InputError("SimConfig: bad sizes");
    if (variant == Variant::preannounce_feasibility && eta <= 0.0)
      throw InputError("SimConfig: preannounce variant requires eta > 0");
  }

  long effective_horizon(double payoff_range) const {
    if (horizon > 0) return horizon;
    if (delta == 0.0) return 1;
    (void)payoff_range;  // tolerance is a range fraction, so the range cancels
    long h = static_cast<long>(std::ceil(std::log(trunc_tol) / std::log(delta)));
    return std::max<long>(h, 1);
  }
};

struct PeriodRow {
  int theta = 0;
  SubsetMask omega = 0;
  int m = 0, a = 0, b = 0, y = 0;
  int x = -1, z = -1;
  double pi_before = 0.0, pi_after = 0.0, xi_m = 0.0;
  int nu = -1;
  double l = 0.0, Z = 0.0;
  bool trusted = false;
};

struct Trajectory {
  std::vector<PeriodRow> rows;  // populated only when log_rows is set
  long horizon = 0;
  bool p1_honest = true;
  double disc_payoff1 = 0.0;  // (1-delta)-normalized
  double disc_payoff2 = 0.0;
  double undisc_mean1 = 0.0;
  long bad_periods = 0;        // xi_t(m_t) <= lambda_bar
  double disc_nu_mass = 0.0;   // preannounce variant
  long nu_one_count = 0;
  double final_pi = 0.0;
};

struct SimResult {
  int num_seeds = 0;
  long horizon = 0;
  double mean_payoff = 0.0, se_payoff = 0.0;
  double mean_undisc = 0.0, se_undisc = 0.0;
  double mean_bad = 0.0, se_bad = 0.0;
  double mean_nu_mass = 0.0, se_nu_mass = 0.0;
  double mean_final_pi = 0.0;
  double trunc_bound = 0.0;  // delta^T * payoff range
};

// --- scenario: everything the engine needs, with precomputed tables --------

namespace detail {

inline double next_uniform(Rng& rng) {
  return (rng() >> 11) * 0x1.0p-53;
}

inline int sample_cdf(const std::vector<double>& cdf, double u) {
  for (std::size_t i = 0; i + 1 < cdf.size(); ++i)
    if (u < cdf[i]) return static_cast<int>(i);
  return static_cast<int>(cdf.size()) - 1;
}

inline int sample_row(const double* row, int n, double u) {
  double acc = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    acc += row[i];
    if (u < acc) return i;
  }
  return n - 1;
}

// Per-regime announcement/keep-word/signal marginals of a declared policy,
// as player 2 computes them from the model.
struct RegimeStats {
  Dist alpha;       // announcement marginal
  Dist xi_of_m;     // keep-word probability given m
  Dist lik_y;       // y marginal
  Dist lik_z;       // z marginal (bounded-memory variant)
};

}  // namespace detail

struct Scenario {
  StageGame game;
  Environment env;
  SignalStructure signals;
  Dist p_theta;
  Player1Policy honest_pol;
  Player1Policy opp_pol;
  BoundModePlayer2 responder;
  double lambda_bar = 0.0;

  // precomputed at build():
  std::vector<double> joint_cdf;  // over (theta, mask) states with mass
  std::vector<int> joint_theta;
  std::vector<SubsetMask> joint_mask;
  std::vector<detail::RegimeStats> honest_stats;  // per regime
  std::vector<detail::RegimeStats> opp_stats;
  double u1_min = 0.0, u1_max = 0.0;

  void build() {
    game.validate();
    env.validate();
    signals.validate();
    honest_pol.validate(env);
    opp_pol.validate(env);
    if (!honest_pol.honest)
      throw InputError("Scenario: honest policy not marked honest");
    p_theta = env.p_theta();
    u1_min = game.u1_min();
    u1_max = game.u1_max();

    const int nt = game.num_theta(), na = game.num_a();
    const int nmask = 1 << na;
    joint_cdf.clear();
    joint_theta.clear();
    joint_mask.clear();
    double acc = 0.0;
    for (int th = 0; th < nt; ++th)
      for (SubsetMask mask = 1; mask < static_cast<SubsetMask>(nmask); ++mask) {
        double p = env.joint_p[th * nmask + mask];
        if (p <= 0.0) continue;
        acc += p;
        joint_cdf.push_back(acc);
        joint_theta.push_back(th);
        joint_mask.push_back(mask);
      }

    auto stats_of = [&](const MarkovPolicy& pol) {
      detail::RegimeStats s;
      s.alpha.assign(na, 0.0);
      Dist keep_mass(na, 0.0);
      s.lik_y.assign(signals.num_y(), 0.0);
      if (signals.has_z()) s.lik_z.assign(signals.num_z(), 0.0);
      for (std::size_t k = 0; k < joint_theta.size(); ++k) {
        int th = joint_theta[k];
        SubsetMask mask = joint_mask[k];
        double p = env.joint_p[th * nmask + mask];
        const double* ar = pol.ann_row(th, mask);
        for (int m = 0; m < na; ++m) {
          if (ar[m] <= 0.0) continue;
          double pm = p * ar[m];
          s.alpha[m] += pm;
          const double* xr = pol.act_row(th, mask, m);
          keep_mass[m] += pm * xr[m];
          for (int a = 0; a < na; ++a) {
            if (xr[a] <= 0.0) continue;
            double pa = pm * xr[a];
            Dist fy = signals.f_row(a, m);
            for (int y = 0; y < signals.num_y(); ++y) s.lik_y[y] += pa * fy[y];
            if (signals.has_z()) {
              Dist gz = signals.g_row(m, a);
              for (int z = 0; z < signals.num_z(); ++z) s.lik_z[z] += pa * gz[z];
            }
          }
        }
      }
      s.xi_of_m.assign(na, 0.0);
      for (int m = 0; m < na; ++m)
        if (s.alpha[m] > 0.0) s.xi_of_m[m] = keep_mass[m] / s.alpha[m];
      return s;
    };
    honest_stats.clear();
    for (const auto& r : honest_pol.regimes) honest_stats.push_back(stats_of(r.table));
    opp_stats.clear();
    for (const auto& r : opp_pol.regimes) opp_stats.push_back(stats_of(r.table));
  }

  // Credibility of announcement m at public belief pi.
  double xi_t(int m, double pi, const detail::RegimeStats& h,
              const detail::RegimeStats& o) const {
    double num = pi * h.alpha[m] * h.xi_of_m[m] +
                 (1.0 - pi) * o.alpha[m] * o.xi_of_m[m];
    double den = pi * h.alpha[m] + (1.0 - pi) * o.alpha[m];
    if (den <= 0.0) return 0.0;  // announcement the model rules out
    return num / den;
  }
};

// --- baseline and bounded-memory episodes ----------------------------------

inline Trajectory run_episode(const SimConfig& config, const Scenario& sc,
                              std::uint64_t episode) {
  config.validate();
  const int na = sc.game.num_a();
  Rng rng = episode_rng(config.master_seed, episode);
  Trajectory tr;
  tr.horizon = config.effective_horizon(sc.u1_max - sc.u1_min);

  bool honest = config.p1_type == P1Type::honest;
  if (config.p1_type == P1Type::prior_draw)
    honest = detail::next_uniform(rng) < config.pi0;
  tr.p1_honest = honest;

  BeliefState belief = BeliefState::from_pi(config.pi0);
  const int K = config.variant == Variant::bounded_memory_z ? config.memory_K : 0;
  std::vector<int> z_window;  // most recent last
  if (K > 0 && !sc.signals.has_z())
    throw InputError("run_episode: bounded-memory variant needs a Z structure");

  double w = 1.0 - config.delta;
  double undisc = 0.0;
  if (config.log_rows) tr.rows.reserve(static_cast<std::size_t>(tr.horizon));

  for (long t = 0; t < tr.horizon; ++t) {
    int rh = sc.honest_pol.active_index(belief.pi);
    int ro = sc.opp_pol.active_index(belief.pi);
    const auto& hs = sc.honest_stats[rh];
    const auto& os = sc.opp_stats[ro];
    const MarkovPolicy& own =
        honest ? sc.honest_pol.regimes[rh].table : sc.opp_pol.regimes[ro].table;

    int k = detail::sample_cdf(sc.joint_cdf, detail::next_uniform(rng));
    int th = sc.joint_theta[k];
    SubsetMask mask = sc.joint_mask[k];

    int m = detail::sample_row(own.ann_row(th, mask), na, detail::next_uniform(rng));

    // Responder belief: full-history pi, or a K-window reconstruction from
    // the prior in the bounded-memory variant.
    double pi_resp = belief.pi;
    if (config.variant == Variant::bounded_memory_z) {
      BeliefState wb = BeliefState::from_pi(config.pi0);
      for (int z : z_window) wb = bayes_update_type(wb, hs.lik_z[z], os.lik_z[z]);
      pi_resp = wb.pi;
    }
    double xi_m = sc.xi_t(m, pi_resp, hs, os);
    auto dec = sc.responder.respond(m, xi_m);
    if (xi_m <= sc.lambda_bar) ++tr.bad_periods;

    int a = detail::sample_row(own.act_row(th, mask, m), na, detail::next_uniform(rng));
    if (honest && (mask & (SubsetMask{1} << m)) && a != m)
      throw InternalError("run_episode: honest type broke its word");

    Dist fy = sc.signals.f_row(a, m);
    int y = detail::sample_row(fy.data(), sc.signals.num_y(),
                               detail::next_uniform(rng));
    int z = -1;
    if (sc.signals.has_z()) {
      Dist gz = sc.signals.g_row(m, a);
      z = detail::sample_row(gz.data(), sc.signals.num_z(),
                             detail::next_uniform(rng));
      z_window.push_back(z);
      if (static_cast<int>(z_window.size()) > std::max(K, 1)) z_window.erase(z_window.begin());
    }

    double u1 = sc.game.u1(th, a, dec.b);
    tr.disc_payoff1 += w * u1;
    tr.disc_payoff2 += w * sc.game.u2(a, dec.b);
    undisc += u1;

    double pi_before = belief.pi;
    belief = bayes_update_type(belief, hs.lik_y[y], os.lik_y[y]);

    if (config.log_rows) {
      PeriodRow row;
      row.theta = th;
      row.omega = mask;
      row.m = m;
      row.a = a;
      row.b = dec.b;
      row.y = y;
      row.z = z;
      row.pi_before = pi_before;
      row.pi_after = belief.pi;
      row.xi_m = xi_m;
      row.trusted = dec.trusted;
      tr.rows.push_back(row);
    }
    w *= config.delta;
  }
  tr.undisc_mean1 = undisc / static_cast<double>(tr.horizon);
  tr.final_pi = belief.pi;
  return tr;
}

// --- quality-announcement episodes -----------------------------------------

// Declared opportunistic scenario policy for the quality variant: a fixed
// effort and either truthful or fixed announcements.
struct QualityOppPolicy {
  int effort = 0;
  bool truthful = false;
  int fixed_m = 0;
};

struct QualityScenario {
  QualityGame qgame;
  int honest_effort = 0;  // the commitment effort a*
  QualityOppPolicy opp;
  double lambda_bar = 0.0;
  double pi0 = 0.5;

  // per announcement m: P(m | type), P(x = m | m, type)
  Dist alpha_h, truth_h, alpha_o, truth_o;
  double lik_h1 = 0.0, lik_o1 = 0.0;  // P(y = 1 | type)
  std::vector<int> b_trust, b_adv;

  void build() {
    qgame.validate();
    const int nx = qgame.num_x(), nb = qgame.num_b();
    alpha_h = qgame.g_row(honest_effort);
    truth_h.assign(nx, 1.0);
    lik_h1 = 1.0;
    alpha_o.assign(nx, 0.0);
    truth_o.assign(nx, 0.0);
    if (opp.truthful) {
      alpha_o = qgame.g_row(opp.effort);
      truth_o.assign(nx, 1.0);
      lik_o1 = 1.0;
    } else {
      alpha_o[opp.fixed_m] = 1.0;
      truth_o[opp.fixed_m] = qgame.g(opp.fixed_m, opp.effort);
      lik_o1 = truth_o[opp.fixed_m];
    }
    b_trust.resize(nx);
    b_adv.resize(nx);
    for (int x = 0; x < nx; ++x) {
      auto br = qgame.best_reply_set_x(x);
      int bt = br[0];
      auto worst_u1 = [&](int b) {
        double v = kInf;
        for (int a = 0; a < qgame.num_a(); ++a) v = std::min(v, qgame.u1(a, b));
        return v;
      };
      for (int b : br)
        if (worst_u1(b) < worst_u1(bt)) bt = b;
      b_trust[x] = bt;
      int ba = 0;
      for (int b = 1; b < nb; ++b)
        if (worst_u1(b) < worst_u1(ba)) ba = b;
      b_adv[x] = ba;
    }
  }

  double xi_t(int m, double pi) const {
    double num = pi * alpha_h[m] * truth_h[m] + (1.0 - pi) * alpha_o[m] * truth_o[m];
    double den = pi * alpha_h[m] + (1.0 - pi) * alpha_o[m];
    if (den <= 0.0) return 0.0;
    return num / den;
  }
};

inline Trajectory run_quality_variant(const SimConfig& config,
                                      const QualityScenario& sc,
                                      std::uint64_t episode) {
  config.validate();
  Rng rng = episode_rng(config.master_seed, episode);
  Trajectory tr;
  double range = 0.0;
  for (double v : sc.qgame.u1_table) range = std::max(range, std::abs(v));
  tr.horizon = config.effective_horizon(2.0 * range + 1e-9);

  bool honest = config.p1_type == P1Type::honest;
  if (config.p1_type == P1Type::prior_draw)
    honest = detail::next_uniform(rng) < config.pi0;
  tr.p1_honest = honest;

  BeliefState belief = BeliefState::from_pi(config.pi0);
  double w = 1.0 - config.delta;
  double undisc = 0.0;
  if (config.log_rows) tr.rows.reserve(static_cast<std::size_t>(tr.horizon));

  const int nx = sc.qgame.num_x();
  for (long t = 0; t < tr.horizon; ++t) {
    int a = honest ? sc.honest_effort : sc.opp.effort;
    Dist gx = sc.qgame.g_row(a);
    int x = detail::sample_row(gx.data(), nx, detail::next_uniform(rng));
    int m = honest || sc.opp.truthful ? x : sc.opp.fixed_m;
    double xi_m = sc.xi_t(m, belief.pi);
    bool trusted = xi_m > sc.lambda_bar;
    int b = trusted ? sc.b_trust[m] : sc.b_adv[m];
    if (xi_m <= sc.lambda_bar) ++tr.bad_periods;
    int y = x == m ? 1 : 0;

    double u1 = sc.qgame.u1(a, b);
    tr.disc_payoff1 += w * u1;
    tr.disc_payoff2 += w * sc.qgame.u2(x, b);
    undisc += u1;

    double pi_before = belief.pi;
    belief = bayes_update_type(belief, y == 1 ? sc.lik_h1 : 1.0 - sc.lik_h1,
                               y == 1 ? sc.lik_o1 : 1.0 - sc.lik_o1);
    if (config.log_rows) {
      PeriodRow row;
      row.theta = 0;
      row.m = m;
      row.a = a;
      row.b = b;
      row.y = y;
      row.x = x;
      row.pi_before = pi_before;
      row.pi_after = belief.pi;
      row.xi_m = xi_m;
      row.trusted = trusted;
      tr.rows.push_back(row);
    }
    w *= config.delta;
  }
  tr.undisc_mean1 = undisc / static_cast<double>(tr.horizon);
  tr.final_pi = belief.pi;
  return tr;
}

// --- pre-announcement (Corollary 3) episodes -------------------------------

// Announcement chosen before omega realizes; trembles already folded into
// the announcement rows.  When the word is infeasible or abandoned, play is
// uniform over the remaining feasible actions.
struct PreannouncePolicy {
  std::vector<double> ann;  // theta*na + m, rows are distributions
  double keep_prob = 1.0;   // probability of playing m when feasible

  const double* row(int theta, int na) const { return ann.data() + theta * na; }
};

inline PreannouncePolicy make_preannounce_policy(const StageGame& game,
                                                 const std::vector<int>& intended,
                                                 double keep_prob, double eta) {
  const int nt = game.num_theta(), na = game.num_a();
  if (static_cast<int>(intended.size()) != nt)
    throw InputError("make_preannounce_policy: intended map not total");
  if (eta * na > 1.0 + kProbTol)
    throw InputError("make_preannounce_policy: eta * |A| exceeds 1");
  PreannouncePolicy p;
  p.keep_prob = keep_prob;
  p.ann.assign(static_cast<std::size_t>(nt) * na, 0.0);
  for (int th = 0; th < nt; ++th) {
    p.ann[th * na + intended[th]] = 1.0;
    tremble_row(p.ann.data() + th * na, na, eta);
  }
  return p;
}

struct PreannounceScenario {
  StageGame game;
  Environment env;
  PreannouncePolicy honest_pol;  // keep_prob must be 1
  PreannouncePolicy opp_pol;
  BoundModePlayer2 responder;
  double lambda_bar = 0.0;

  Dist p_theta;
  Dist alpha_h, keep_h, alpha_o, keep_o;  // per announcement m
  double lik_h1 = 0.0, lik_o1 = 0.0;      // P(y = 1 | type)

  // P(a = m | m announced, theta) for a keep_prob policy: forced when omega
  // is the singleton {m}, impossible when m is infeasible.
  double keep_given(int th, int m, double kp) const {
    const int nmask = 1 << game.num_a();
    double tot = 0.0, keep = 0.0;
    for (SubsetMask mask = 1; mask < static_cast<SubsetMask>(nmask); ++mask) {
      double p = env.joint_p[th * nmask + mask];
      if (p <= 0.0) continue;
      tot += p;
      if (!(mask & (SubsetMask{1} << m))) continue;
      bool singleton = mask == (SubsetMask{1} << m);
      keep += p * (singleton ? 1.0 : kp);
    }
    return tot > 0.0 ? keep / tot : 0.0;
  }

  void build() {
    game.validate();
    env.validate();
    if (honest_pol.keep_prob != 1.0)
      throw InputError("PreannounceScenario: honest keep_prob must be 1");
    p_theta = env.p_theta();
    const int nt = game.num_theta(), na = game.num_a();
    alpha_h.assign(na, 0.0);
    alpha_o.assign(na, 0.0);
    keep_h.assign(na, 0.0);
    keep_o.assign(na, 0.0);
    lik_h1 = lik_o1 = 0.0;
    for (int m = 0; m < na; ++m) {
      double kh = 0.0, ko = 0.0;
      for (int th = 0; th < nt; ++th) {
        double ph = p_theta[th] * honest_pol.row(th, na)[m];
        double po = p_theta[th] * opp_pol.row(th, na)[m];
        alpha_h[m] += ph;
        alpha_o[m] += po;
        kh += ph * keep_given(th, m, honest_pol.keep_prob);
        ko += po * keep_given(th, m, opp_pol.keep_prob);
      }
      keep_h[m] = alpha_h[m] > 0.0 ? kh / alpha_h[m] : 0.0;
      keep_o[m] = alpha_o[m] > 0.0 ? ko / alpha_o[m] : 0.0;
      lik_h1 += kh;
      lik_o1 += ko;
    }
  }

  double xi_t(int m, double pi) const {
    double num = pi * alpha_h[m] * keep_h[m] + (1.0 - pi) * alpha_o[m] * keep_o[m];
    double den = pi * alpha_h[m] + (1.0 - pi) * alpha_o[m];
    if (den <= 0.0) return 0.0;
    return num / den;
  }
};

inline Trajectory run_preannounce_variant(const SimConfig& config,
                                          const PreannounceScenario& sc,
                                          std::uint64_t episode) {
  config.validate();
  if (config.variant != Variant::preannounce_feasibility)
    throw InputError("run_preannounce_variant: wrong variant tag");
  const int na = sc.game.num_a();
  const int nmask = 1 << na;
  Rng rng = episode_rng(config.master_seed, episode);
  Trajectory tr;
  tr.horizon = config.effective_horizon(sc.game.u1_max() - sc.game.u1_min());

  bool honest = config.p1_type == P1Type::honest;
  if (config.p1_type == P1Type::prior_draw)
    honest = detail::next_uniform(rng) < config.pi0;
  tr.p1_honest = honest;
  const PreannouncePolicy& own = honest ? sc.honest_pol : sc.opp_pol;

  // conditional omega draw per theta
  std::vector<std::vector<double>> mask_cdf(sc.game.num_theta());
  std::vector<std::vector<SubsetMask>> mask_of(sc.game.num_theta());
  for (int th = 0; th < sc.game.num_theta(); ++th) {
    double tot = 0.0;
    for (SubsetMask mask = 1; mask < static_cast<SubsetMask>(nmask); ++mask)
      tot += std::max(sc.env.joint_p[th * nmask + mask], 0.0);
    double acc = 0.0;
    for (SubsetMask mask = 1; mask < static_cast<SubsetMask>(nmask); ++mask) {
      double p = sc.env.joint_p[th * nmask + mask];
      if (p <= 0.0) continue;
      acc += p / tot;
      mask_cdf[th].push_back(acc);
      mask_of[th].push_back(mask);
    }
  }
  std::vector<double> theta_cdf(sc.p_theta.size());
  double acc = 0.0;
  for (std::size_t th = 0; th < sc.p_theta.size(); ++th) {
    acc += sc.p_theta[th];
    theta_cdf[th] = acc;
  }

  BeliefState belief = BeliefState::from_pi(config.pi0);
  double w = 1.0 - config.delta;
  double undisc = 0.0;
  if (config.log_rows) tr.rows.reserve(static_cast<std::size_t>(tr.horizon));

  for (long t = 0; t < tr.horizon; ++t) {
    int th = detail::sample_cdf(theta_cdf, detail::next_uniform(rng));
    int m = detail::sample_row(own.row(th, na), na, detail::next_uniform(rng));

    // nu_t: every announcement would force a strict best reply
    int nu = 1;
    double xi_min = 1.0;
    for (int a = 0; a < na; ++a) xi_min = std::min(xi_min, sc.xi_t(a, belief.pi));
    if (xi_min <= config.xi_threshold) nu = 0;
    tr.nu_one_count += nu;
    tr.disc_nu_mass += w * nu;

    double xi_m = sc.xi_t(m, belief.pi);
    auto dec = sc.responder.respond(m, xi_m);
    if (xi_m <= sc.lambda_bar) ++tr.bad_periods;

    int k = detail::sample_cdf(mask_cdf[th], detail::next_uniform(rng));
    SubsetMask mask = mask_of[th][k];
    int a;
    bool m_feasible = mask & (SubsetMask{1} << m);
    bool keep = m_feasible && (mask == (SubsetMask{1} << m) ||
                               detail::next_uniform(rng) < own.keep_prob);
    if (keep) {
      a = m;
    } else {
      SubsetMask residual = m_feasible ? (mask & ~(SubsetMask{1} << m)) : mask;
      if (residual == 0) residual = mask;
      int cnt = 0;
      for (int i = 0; i < na; ++i)
        if (residual & (SubsetMask{1} << i)) ++cnt;
      int pick = static_cast<int>(detail::next_uniform(rng) * cnt);
      if (pick >= cnt) pick = cnt - 1;
      a = -1;
      for (int i = 0; i < na && pick >= 0; ++i)
        if (residual & (SubsetMask{1} << i)) {
          a = i;
          --pick;
        }
    }
    int y = a == m ? 1 : 0;

    double u1 = sc.game.u1(th, a, dec.b);
    tr.disc_payoff1 += w * u1;
    tr.disc_payoff2 += w * sc.game.u2(a, dec.b);
    undisc += u1;

    double l_before = belief.log_lr;
    double lik_h = y == 1 ? sc.lik_h1 : 1.0 - sc.lik_h1;
    double lik_o = y == 1 ? sc.lik_o1 : 1.0 - sc.lik_o1;
    double pi_before = belief.pi;
    belief = bayes_update_type(belief, lik_h, lik_o);

    if (config.log_rows) {
      PeriodRow row;
      row.theta = th;
      row.omega = mask;
      row.m = m;
      row.a = a;
      row.b = dec.b;
      row.y = y;
      row.pi_before = pi_before;
      row.pi_after = belief.pi;
      row.xi_m = xi_m;
      row.nu = nu;
      row.l = l_before;
      row.Z = std::log(lik_h) - std::log(lik_o);
      row.trusted = dec.trusted;
      tr.rows.push_back(row);
    }
    w *= config.delta;
  }
  tr.undisc_mean1 = undisc / static_cast<double>(tr.horizon);
  tr.final_pi = belief.pi;
  return tr;
}

// --- multi-seed aggregation ------------------------------------------------

namespace detail {

inline void mean_se(const std::vector<double>& v, double& mean, double& se) {
  double s = 0.0;
  for (double x : v) s += x;
  mean = s / v.size();
  double q = 0.0;
  for (double x : v) q += (x - mean) * (x - mean);
  se = v.size() > 1 ? std::sqrt(q / (v.size() - 1) / v.size()) : 0.0;
}

template <typename RunFn>
inline SimResult aggregate(const SimConfig& config, double payoff_range,
                           RunFn run) {
  if (config.num_seeds < 2)
    throw InputError("estimate: at least two seeds required");
  std::vector<Trajectory> out(config.num_seeds);
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, config.num_seeds);
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (unsigned wkr = 0; wkr < workers; ++wkr)
    pool.emplace_back([&]() {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= config.num_seeds) return;
        out[i] = run(static_cast<std::uint64_t>(i));
      }
    });
  for (auto& th : pool) th.join();

  SimResult r;
  r.num_seeds = config.num_seeds;
  r.horizon = out[0].horizon;
  std::vector<double> pay, und, bad, nu, fpi;
  for (const auto& tr : out) {
    pay.push_back(tr.disc_payoff1);
    und.push_back(tr.undisc_mean1);
    bad.push_back(static_cast<double>(tr.bad_periods));
    nu.push_back(tr.disc_nu_mass);
    fpi.push_back(tr.final_pi);
  }
  mean_se(pay, r.mean_payoff, r.se_payoff);
  mean_se(und, r.mean_undisc, r.se_undisc);
  mean_se(bad, r.mean_bad, r.se_bad);
  mean_se(nu, r.mean_nu_mass, r.se_nu_mass);
  double s = 0.0;
  for (double x : fpi) s += x;
  r.mean_final_pi = s / fpi.size();
  r.trunc_bound = std::pow(config.delta, static_cast<double>(r.horizon)) *
                  payoff_range;
  return r;
}

}  // namespace detail

inline SimResult estimate(const SimConfig& config, const Scenario& sc) {
  return detail::aggregate(config, sc.u1_max - sc.u1_min,
                           [&](std::uint64_t i) { return run_episode(config, sc, i); });
}

inline SimResult estimate_quality(const SimConfig& config,
                                  const QualityScenario& sc) {
  double lo = kInf, hi = -kInf;
  for (double v : sc.qgame.u1_table) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return detail::aggregate(config, hi - lo, [&](std::uint64_t i) {
    return run_quality_variant(config, sc, i);
  });
}

inline SimResult estimate_preannounce(const SimConfig& config,
                                      const PreannounceScenario& sc) {
  return detail::aggregate(config, sc.game.u1_max() - sc.game.u1_min(),
                           [&](std::uint64_t i) {
                             return run_preannounce_variant(config, sc, i);
                           });
}

}  // namespace repgame
