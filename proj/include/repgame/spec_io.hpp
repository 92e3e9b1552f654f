#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "repgame/beliefs.hpp"
#include "repgame/quality.hpp"
#include "repgame/simulator.hpp"
#include "repgame/solvers.hpp"
#include "repgame/stage_game.hpp"
#include "repgame/strategies.hpp"
#include "repgame/verify.hpp"

namespace repgame {

using json = nlohmann::ordered_json;

// Opportunistic scenario policy selection, by name plus parameters.
struct OppSpec {
  std::string name = "myopic_greedy";  // mimic_honest | myopic_greedy | threshold_milking
  double p_keep = 0.0;
  double pi_switch = 0.5;
  double p_keep_high = 0.0;
};

struct QualitySection {
  QualityGame game;
  QualityOppPolicy opp;
};

struct SpecDocument {
  StageGame game;
  Environment env;
  SignalStructure signals;
  bool has_sim = false;
  SimConfig sim;
  OppSpec opp;
  bool has_quality = false;
  QualitySection quality;
  bool strict_subset = false;  // v1' restricted to proper subsets of A
};

// --- parsing ----------------------------------------------------------------

namespace specio_detail {

inline void reject_unknown(const json& obj, const std::string& section,
                           const std::set<std::string>& allowed) {
  if (!obj.is_object())
    throw InputError("spec: section '" + section + "' must be an object");
  for (const auto& [key, val] : obj.items()) {
    (void)val;
    if (!allowed.count(key))
      throw InputError("spec: unknown key '" + key + "' in section '" +
                       section + "'");
  }
}

inline std::vector<std::string> labels_of(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw InputError("spec: '" + where + "' must be a nonempty array");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw InputError("spec: '" + where + "' entries must be strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

inline int label_index(const std::vector<std::string>& labels,
                       const std::string& s, const std::string& where) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == s) return static_cast<int>(i);
  throw InputError("spec: unknown label '" + s + "' in '" + where + "'");
}

inline double num_of(const json& j, const std::string& where) {
  if (!j.is_number()) throw InputError("spec: '" + where + "' must be a number");
  return j.get<double>();
}

// Flattens a nested numeric array with the given dimensions.
inline void flatten(const json& j, const std::vector<std::size_t>& dims,
                    std::size_t level, std::vector<double>& out,
                    const std::string& where) {
  if (level == dims.size()) {
    out.push_back(num_of(j, where));
    return;
  }
  if (!j.is_array() || j.size() != dims[level])
    throw InputError("spec: '" + where + "' has wrong shape");
  for (const auto& e : j) flatten(e, dims, level + 1, out, where);
}

}  // namespace specio_detail

inline SpecDocument load_spec_json(const json& root) {
  using namespace specio_detail;
  reject_unknown(root, "(top level)",
                 {"game", "environment", "signals", "sim", "quality", "solve"});
  if (!root.contains("game")) throw InputError("spec: missing 'game' section");
  SpecDocument doc;

  {
    const json& g = root["game"];
    reject_unknown(g, "game", {"theta", "a", "b", "u1", "u2"});
    doc.game.theta_labels = labels_of(g.at("theta"), "game.theta");
    doc.game.a_labels = labels_of(g.at("a"), "game.a");
    doc.game.b_labels = labels_of(g.at("b"), "game.b");
    std::size_t nt = doc.game.theta_labels.size(), na = doc.game.a_labels.size(),
                nb = doc.game.b_labels.size();
    flatten(g.at("u1"), {nt, na, nb}, 0, doc.game.u1_table, "game.u1");
    flatten(g.at("u2"), {na, nb}, 0, doc.game.u2_table, "game.u2");
    doc.game.validate();
  }

  {
    if (!root.contains("environment"))
      throw InputError("spec: missing 'environment' section");
    const json& e = root["environment"];
    reject_unknown(e, "environment", {"entries"});
    doc.env.num_theta = doc.game.num_theta();
    doc.env.num_a = doc.game.num_a();
    doc.env.joint_p.assign(
        static_cast<std::size_t>(doc.env.num_theta) << doc.env.num_a, 0.0);
    if (!e.contains("entries") || !e["entries"].is_array())
      throw InputError("spec: 'environment.entries' must be an array");
    for (const auto& ent : e["entries"]) {
      reject_unknown(ent, "environment.entries[]", {"theta", "subset", "p"});
      int th = label_index(doc.game.theta_labels,
                           ent.at("theta").get<std::string>(), "environment");
      SubsetMask mask = 0;
      for (const auto& s : ent.at("subset"))
        mask |= SubsetMask{1} << label_index(doc.game.a_labels,
                                             s.get<std::string>(), "environment");
      if (mask == 0) throw InputError("spec: empty subset in 'environment'");
      doc.env.joint_p[(static_cast<std::size_t>(th) << doc.env.num_a) + mask] +=
          num_of(ent.at("p"), "environment.p");
    }
    doc.env.validate();
  }

  {
    if (!root.contains("signals"))
      throw InputError("spec: missing 'signals' section");
    const json& s = root["signals"];
    reject_unknown(s, "signals", {"y", "f", "z", "g", "k"});
    doc.signals.num_a = doc.game.num_a();
    doc.signals.y_labels = labels_of(s.at("y"), "signals.y");
    std::size_t na = doc.game.a_labels.size(), ny = doc.signals.y_labels.size();
    flatten(s.at("f"), {na, na, ny}, 0, doc.signals.f_table, "signals.f");
    if (s.contains("z")) {
      doc.signals.z_labels = labels_of(s["z"], "signals.z");
      std::size_t nz = doc.signals.z_labels.size();
      flatten(s.at("g"), {na, na, nz}, 0, doc.signals.g_table, "signals.g");
      doc.signals.memory_K = s.contains("k") ? s["k"].get<int>() : 0;
    } else if (s.contains("g") || s.contains("k")) {
      throw InputError("spec: 'signals.g'/'signals.k' require 'signals.z'");
    }
    doc.signals.validate();
  }

  if (root.contains("sim")) {
    const json& s = root["sim"];
    reject_unknown(s, "sim",
                   {"delta", "horizon", "seeds", "seed", "variant", "p1_type",
                    "pi0", "eta", "memory_k", "xi_threshold", "opp"});
    doc.has_sim = true;
    doc.sim.delta = num_of(s.at("delta"), "sim.delta");
    if (s.contains("horizon")) doc.sim.horizon = s["horizon"].get<long>();
    if (s.contains("seeds")) doc.sim.num_seeds = s["seeds"].get<int>();
    if (s.contains("seed")) doc.sim.master_seed = s["seed"].get<std::uint64_t>();
    if (s.contains("pi0")) doc.sim.pi0 = num_of(s["pi0"], "sim.pi0");
    if (s.contains("eta")) doc.sim.eta = num_of(s["eta"], "sim.eta");
    if (s.contains("memory_k")) doc.sim.memory_K = s["memory_k"].get<int>();
    if (s.contains("xi_threshold"))
      doc.sim.xi_threshold = num_of(s["xi_threshold"], "sim.xi_threshold");
    if (s.contains("variant")) {
      std::string v = s["variant"].get<std::string>();
      if (v == "baseline") doc.sim.variant = Variant::baseline;
      else if (v == "bounded_memory_z") doc.sim.variant = Variant::bounded_memory_z;
      else if (v == "quality_announcement")
        doc.sim.variant = Variant::quality_announcement;
      else if (v == "preannounce_feasibility")
        doc.sim.variant = Variant::preannounce_feasibility;
      else throw InputError("spec: unknown variant '" + v + "'");
    }
    if (s.contains("p1_type")) {
      std::string v = s["p1_type"].get<std::string>();
      if (v == "honest") doc.sim.p1_type = P1Type::honest;
      else if (v == "opportunistic") doc.sim.p1_type = P1Type::opportunistic;
      else if (v == "prior_draw") doc.sim.p1_type = P1Type::prior_draw;
      else throw InputError("spec: unknown p1_type '" + v + "'");
    }
    if (s.contains("opp")) {
      const json& o = s["opp"];
      reject_unknown(o, "sim.opp", {"name", "p_keep", "pi_switch", "p_keep_high"});
      if (o.contains("name")) doc.opp.name = o["name"].get<std::string>();
      if (o.contains("p_keep")) doc.opp.p_keep = num_of(o["p_keep"], "sim.opp.p_keep");
      if (o.contains("pi_switch"))
        doc.opp.pi_switch = num_of(o["pi_switch"], "sim.opp.pi_switch");
      if (o.contains("p_keep_high"))
        doc.opp.p_keep_high = num_of(o["p_keep_high"], "sim.opp.p_keep_high");
      if (doc.opp.name != "mimic_honest" && doc.opp.name != "myopic_greedy" &&
          doc.opp.name != "threshold_milking")
        throw InputError("spec: unknown opponent policy '" + doc.opp.name + "'");
    }
  }

  if (root.contains("quality")) {
    const json& q = root["quality"];
    reject_unknown(q, "quality",
                   {"a", "x", "b", "u1", "u2", "g", "opp_effort", "opp_truthful",
                    "opp_fixed_m"});
    doc.has_quality = true;
    QualityGame& qg = doc.quality.game;
    qg.a_labels = labels_of(q.at("a"), "quality.a");
    qg.x_labels = labels_of(q.at("x"), "quality.x");
    qg.b_labels = labels_of(q.at("b"), "quality.b");
    std::size_t na = qg.a_labels.size(), nx = qg.x_labels.size(),
                nb = qg.b_labels.size();
    flatten(q.at("u1"), {na, nb}, 0, qg.u1_table, "quality.u1");
    flatten(q.at("u2"), {nx, nb}, 0, qg.u2_table, "quality.u2");
    flatten(q.at("g"), {na, nx}, 0, qg.g_table, "quality.g");
    qg.validate();
    if (q.contains("opp_effort"))
      doc.quality.opp.effort = label_index(qg.a_labels,
                                           q["opp_effort"].get<std::string>(),
                                           "quality.opp_effort");
    if (q.contains("opp_truthful"))
      doc.quality.opp.truthful = q["opp_truthful"].get<bool>();
    if (q.contains("opp_fixed_m"))
      doc.quality.opp.fixed_m = label_index(qg.x_labels,
                                            q["opp_fixed_m"].get<std::string>(),
                                            "quality.opp_fixed_m");
  }

  if (root.contains("solve")) {
    const json& s = root["solve"];
    reject_unknown(s, "solve", {"strict_subset"});
    if (s.contains("strict_subset"))
      doc.strict_subset = s["strict_subset"].get<bool>();
  }
  return doc;
}

inline SpecDocument load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("spec: cannot open '" + path + "'");
  json root;
  try {
    in >> root;
  } catch (const std::exception& e) {
    throw InputError(std::string("spec: JSON parse error: ") + e.what());
  }
  return load_spec_json(root);
}

// --- serialization ----------------------------------------------------------

// Rounds to 12 significant digits for stable textual output.
inline double round12(double x) {
  if (x == 0.0 || !std::isfinite(x)) return x;
  double mag = std::pow(10.0, 11 - std::floor(std::log10(std::abs(x))));
  return std::round(x * mag) / mag;
}

inline json spec_to_json(const SpecDocument& doc) {
  json root;
  {
    json g;
    g["theta"] = doc.game.theta_labels;
    g["a"] = doc.game.a_labels;
    g["b"] = doc.game.b_labels;
    json u1 = json::array();
    for (int th = 0; th < doc.game.num_theta(); ++th) {
      json rows = json::array();
      for (int a = 0; a < doc.game.num_a(); ++a) {
        json row = json::array();
        for (int b = 0; b < doc.game.num_b(); ++b) row.push_back(doc.game.u1(th, a, b));
        rows.push_back(row);
      }
      u1.push_back(rows);
    }
    g["u1"] = u1;
    json u2 = json::array();
    for (int a = 0; a < doc.game.num_a(); ++a) {
      json row = json::array();
      for (int b = 0; b < doc.game.num_b(); ++b) row.push_back(doc.game.u2(a, b));
      u2.push_back(row);
    }
    g["u2"] = u2;
    root["game"] = g;
  }
  {
    json entries = json::array();
    const int nmask = 1 << doc.env.num_a;
    for (int th = 0; th < doc.env.num_theta; ++th)
      for (SubsetMask mask = 1; mask < static_cast<SubsetMask>(nmask); ++mask) {
        double p = doc.env.p(th, mask);
        if (p <= 0.0) continue;
        json ent;
        ent["theta"] = doc.game.theta_labels[th];
        json subset = json::array();
        for (int a = 0; a < doc.env.num_a; ++a)
          if (mask & (SubsetMask{1} << a)) subset.push_back(doc.game.a_labels[a]);
        ent["subset"] = subset;
        ent["p"] = p;
        entries.push_back(ent);
      }
    root["environment"] = {{"entries", entries}};
  }
  {
    json s;
    s["y"] = doc.signals.y_labels;
    json f = json::array();
    for (int a = 0; a < doc.signals.num_a; ++a) {
      json rows = json::array();
      for (int m = 0; m < doc.signals.num_a; ++m) rows.push_back(doc.signals.f_row(a, m));
      f.push_back(rows);
    }
    s["f"] = f;
    if (doc.signals.has_z()) {
      s["z"] = doc.signals.z_labels;
      json gt = json::array();
      for (int m = 0; m < doc.signals.num_a; ++m) {
        json rows = json::array();
        for (int a = 0; a < doc.signals.num_a; ++a) rows.push_back(doc.signals.g_row(m, a));
        gt.push_back(rows);
      }
      s["g"] = gt;
      s["k"] = doc.signals.memory_K;
    }
    root["signals"] = s;
  }
  if (doc.has_sim) {
    json s;
    s["delta"] = doc.sim.delta;
    if (doc.sim.horizon > 0) s["horizon"] = doc.sim.horizon;
    s["seeds"] = doc.sim.num_seeds;
    s["seed"] = doc.sim.master_seed;
    switch (doc.sim.variant) {
      case Variant::baseline: s["variant"] = "baseline"; break;
      case Variant::bounded_memory_z: s["variant"] = "bounded_memory_z"; break;
      case Variant::quality_announcement: s["variant"] = "quality_announcement"; break;
      case Variant::preannounce_feasibility:
        s["variant"] = "preannounce_feasibility";
        break;
    }
    switch (doc.sim.p1_type) {
      case P1Type::honest: s["p1_type"] = "honest"; break;
      case P1Type::opportunistic: s["p1_type"] = "opportunistic"; break;
      case P1Type::prior_draw: s["p1_type"] = "prior_draw"; break;
    }
    s["pi0"] = doc.sim.pi0;
    s["eta"] = doc.sim.eta;
    s["memory_k"] = doc.sim.memory_K;
    s["xi_threshold"] = doc.sim.xi_threshold;
    json o;
    o["name"] = doc.opp.name;
    o["p_keep"] = doc.opp.p_keep;
    o["pi_switch"] = doc.opp.pi_switch;
    o["p_keep_high"] = doc.opp.p_keep_high;
    s["opp"] = o;
    root["sim"] = s;
  }
  if (doc.has_quality) {
    json q;
    const QualityGame& qg = doc.quality.game;
    q["a"] = qg.a_labels;
    q["x"] = qg.x_labels;
    q["b"] = qg.b_labels;
    json u1 = json::array();
    for (int a = 0; a < qg.num_a(); ++a) {
      json row = json::array();
      for (int b = 0; b < qg.num_b(); ++b) row.push_back(qg.u1(a, b));
      u1.push_back(row);
    }
    q["u1"] = u1;
    json u2 = json::array();
    for (int x = 0; x < qg.num_x(); ++x) {
      json row = json::array();
      for (int b = 0; b < qg.num_b(); ++b) row.push_back(qg.u2(x, b));
      u2.push_back(row);
    }
    q["u2"] = u2;
    json gt = json::array();
    for (int a = 0; a < qg.num_a(); ++a) gt.push_back(qg.g_row(a));
    q["g"] = gt;
    q["opp_effort"] = qg.a_labels[doc.quality.opp.effort];
    q["opp_truthful"] = doc.quality.opp.truthful;
    q["opp_fixed_m"] = qg.x_labels[doc.quality.opp.fixed_m];
    root["quality"] = q;
  }
  root["solve"] = {{"strict_subset", doc.strict_subset}};
  return root;
}

// --- scenario assembly ------------------------------------------------------

inline Player1Policy build_opp_policy(const StageGame& game,
                                      const std::vector<int>& a_star,
                                      const OppSpec& opp) {
  if (opp.name == "mimic_honest") return mimic_honest_policy(game, a_star);
  if (opp.name == "myopic_greedy")
    return myopic_greedy_policy(game, a_star, opp.p_keep);
  return threshold_milking_policy(game, a_star, opp.pi_switch, opp.p_keep_high);
}

inline Scenario build_scenario(const SpecDocument& doc) {
  Scenario sc;
  sc.game = doc.game;
  sc.env = doc.env;
  sc.signals = doc.signals;
  Dist pt = doc.env.p_theta();
  auto a_star = stackelberg(sc.game, pt).a_star;
  sc.honest_pol = honest_star_policy(sc.game, a_star);
  sc.opp_pol = build_opp_policy(sc.game, a_star, doc.opp);
  sc.lambda_bar = lambda_bar(sc.game, pt).lambda_bar;
  sc.responder = make_bound_mode_player2(sc.game, pt, sc.lambda_bar);
  sc.build();
  return sc;
}

inline PreannounceScenario build_preannounce_scenario(const SpecDocument& doc) {
  PreannounceScenario ps;
  ps.game = doc.game;
  ps.env = doc.env;
  Dist pt = doc.env.p_theta();
  auto a_star = stackelberg(ps.game, pt).a_star;
  ps.honest_pol = make_preannounce_policy(ps.game, a_star, 1.0, doc.sim.eta);
  // opportunistic intends the first action everywhere and keeps with p_keep
  std::vector<int> intended(ps.game.num_theta(), 0);
  ps.opp_pol = make_preannounce_policy(ps.game, intended, doc.opp.p_keep, doc.sim.eta);
  ps.lambda_bar = lambda_bar(ps.game, pt).lambda_bar;
  ps.responder = make_bound_mode_player2(ps.game, pt, ps.lambda_bar);
  ps.build();
  return ps;
}

inline QualityScenario build_quality_scenario(const SpecDocument& doc) {
  if (!doc.has_quality)
    throw InputError("spec: quality variant requires a 'quality' section");
  QualityScenario qs;
  qs.qgame = doc.quality.game;
  qs.honest_effort = commitment_payoff_quality(qs.qgame).a_star;
  qs.opp = doc.quality.opp;
  qs.lambda_bar = lambda_bar_quality(qs.qgame);
  qs.pi0 = doc.sim.pi0;
  qs.build();
  return qs;
}

// --- reports ----------------------------------------------------------------

inline json dist_to_json(const Dist& d) {
  json out = json::array();
  for (double x : d) out.push_back(round12(x));
  return out;
}

inline json solve_report(const SpecDocument& doc) {
  const StageGame& g = doc.game;
  Dist pt = doc.env.p_theta();
  json rep;

  auto stack = stackelberg(g, pt);
  json st;
  st["a_star"] = json::array();
  st["v1_star"] = json::array();
  for (int th = 0; th < g.num_theta(); ++th) {
    st["a_star"].push_back(g.a_labels[stack.a_star[th]]);
    st["v1_star"].push_back(round12(stack.v1_star[th]));
  }
  st["expected"] = round12(stack.expected);
  rep["stackelberg"] = st;

  auto feas = feasible_commitment(g, doc.env);
  rep["u1_star_expected"] = round12(feas.expected);

  auto mm = minmax(g, pt);
  json mj;
  mj["per_theta"] = dist_to_json(mm.per_state);
  mj["expected"] = round12(mm.expected);
  rep["minmax"] = mj;

  auto aux = solve_aux_no_comm(g, pt);
  rep["v1_min"] = round12(aux.v1_min);
  auto rec = solve_aux_recommendation(g, pt);
  rep["v_hat_1"] = rec.has_pure_equilibrium() ? json(round12(rec.v_hat_1))
                                              : json("+inf");

  auto v1p = solve_v1_prime(g, pt, aux.v1_min, rec.v_hat_1);
  const V1PrimeWitness& w = doc.strict_subset ? v1p.witness_strict : v1p.witness;
  json vj;
  vj["feasible"] = w.feasible;
  if (w.feasible) {
    vj["value"] = round12(w.value);
    json ap = json::array();
    for (int a : w.a_prime) ap.push_back(g.a_labels[a]);
    vj["a_prime"] = ap;
    json beta;
    for (int a : w.a_prime) beta[g.a_labels[a]] = dist_to_json(w.beta[a]);
    vj["beta"] = beta;
  }
  rep["v1_prime"] = vj;

  auto lb = lambda_bar(g, pt);
  rep["lambda_bar"] = round12(lb.lambda_bar);
  rep["lambda_bar_degenerate"] = lb.degenerate;

  auto asm_rep = check_assumptions(doc.env, doc.signals);
  json aj;
  aj["a1"] = asm_rep.a1;
  aj["a2i"] = asm_rep.a2_i;
  aj["a2ii"] = asm_rep.a2_ii;
  aj["rho_lower"] = round12(doc.env.rho_lower());
  aj["flexibility"] = round12(doc.env.flexibility());
  rep["assumptions"] = aj;

  auto sm = check_supermodularity(g, pt);
  json sj;
  sj["condition"] = sm.condition();
  sj["lemma1_2"] = sm.lemma1_2;
  rep["supermodularity"] = sj;
  return rep;
}

inline json bound_report(const SpecDocument& doc) {
  const StageGame& g = doc.game;
  Dist pt = doc.env.p_theta();
  json rep;
  auto lb = lambda_bar(g, pt);
  double rho = doc.env.rho_lower();
  double xi_star = 1.0 - (1.0 - lb.lambda_bar) * rho;
  rep["lambda_bar"] = round12(lb.lambda_bar);
  rep["xi_star"] = round12(xi_star);
  double D = d_star(doc.signals, xi_star);
  rep["d_star"] = D == kInf ? json("+inf") : json(round12(D));

  double pi0 = doc.has_sim ? doc.sim.pi0 : 0.5;
  double delta = doc.has_sim ? doc.sim.delta : 0.99;
  long T = t_bar(pi0, D);
  rep["pi0"] = round12(pi0);
  rep["t_bar"] = T;

  auto stack = stackelberg(g, pt);
  // eps = unconditional mass of "the commitment action is infeasible"
  double eps = 0.0;
  for (int th = 0; th < g.num_theta(); ++th)
    for (SubsetMask mask = 1; mask < (SubsetMask{1} << doc.env.num_a); ++mask)
      if (!(mask & (SubsetMask{1} << stack.a_star[th])))
        eps += doc.env.p(th, mask);
  double min_p = *std::min_element(pt.begin(), pt.end());
  rep["epsilon"] = round12(eps);
  rep["bound_3_6"] =
      round12(bound_3_6(stack.expected, g.u1_min(), delta, eps, min_p, T));

  if (doc.signals.has_z()) {
    auto xh = xi_hat(rho, doc.signals.memory_K, xi_star);
    rep["xi_hat"] = round12(xh.xi_hat);
    double Dh = xh.xi_hat < 1.0 ? d_star(doc.signals, xh.xi_hat) : 0.0;
    rep["d_hat"] = round12(Dh);
    rep["t_hat"] = Dh > 0.0 ? json(t_hat(pi0, Dh)) : json("+inf");
  }
  if (doc.has_quality) {
    auto q = commitment_payoff_quality(doc.quality.game);
    rep["v_star_star"] = round12(q.v_star_star);
    rep["quality_a_star"] = doc.quality.game.a_labels[q.a_star];
  }
  if (doc.has_sim && doc.sim.eta > 0.0) {
    // Corollary-3 rho = preannounce probability 1 - P(omega = A)
    auto c = corollary3_constants(1.0 - doc.env.flexibility(), doc.sim.eta,
                                  doc.sim.xi_threshold);
    json cj;
    cj["rho"] = round12(1.0 - doc.env.flexibility());
    cj["eta"] = round12(doc.sim.eta);
    cj["xi"] = round12(doc.sim.xi_threshold);
    cj["alpha"] = round12(c.alpha);
    cj["beta"] = round12(c.beta);
    cj["good_fraction"] = round12(c.good_fraction);
    cj["degenerate"] = c.degenerate;
    rep["corollary3"] = cj;
  }
  return rep;
}

inline json sim_result_to_json(const SimResult& r) {
  json j;
  j["num_seeds"] = r.num_seeds;
  j["horizon"] = r.horizon;
  j["mean_payoff"] = round12(r.mean_payoff);
  j["se_payoff"] = round12(r.se_payoff);
  j["mean_undisc"] = round12(r.mean_undisc);
  j["se_undisc"] = round12(r.se_undisc);
  j["mean_bad_periods"] = round12(r.mean_bad);
  j["se_bad_periods"] = round12(r.se_bad);
  j["mean_nu_mass"] = round12(r.mean_nu_mass);
  j["se_nu_mass"] = round12(r.se_nu_mass);
  j["mean_final_pi"] = round12(r.mean_final_pi);
  j["truncation_bound"] = round12(r.trunc_bound);
  return j;
}

inline json verification_to_json(const VerificationReport& rep) {
  json out;
  out["all_pass"] = rep.all_pass();
  json checks = json::array();
  for (const auto& c : rep.checks) {
    json cj;
    cj["name"] = c.name;
    cj["pass"] = c.pass;
    cj["measured"] = round12(c.measured);
    cj["bound"] = round12(c.bound);
    cj["tolerance"] = round12(c.tolerance);
    cj["sample_size"] = c.sample_size;
    if (!c.witness.empty()) cj["witness"] = c.witness;
    checks.push_back(cj);
  }
  out["checks"] = checks;
  return out;
}

// One row per period, plot-friendly.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,theta,omega,m,a,b,y,x,z,pi_before,pi_after,xi_m,nu,l,Z,trusted\n";
  for (std::size_t t = 0; t < tr.rows.size(); ++t) {
    const auto& r = tr.rows[t];
    os << t << ',' << r.theta << ',' << r.omega << ',' << r.m << ',' << r.a
       << ',' << r.b << ',' << r.y << ',' << r.x << ',' << r.z << ','
       << r.pi_before << ',' << r.pi_after << ',' << r.xi_m << ',' << r.nu
       << ',' << r.l << ',' << r.Z << ',' << (r.trusted ? 1 : 0) << '\n';
  }
}

}  // namespace repgame
