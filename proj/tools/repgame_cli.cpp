#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "repgame/spec_io.hpp"

using namespace repgame;

namespace {

struct CliOptions {
  std::string spec_path;
  std::string out_dir;
  long long seed = -1;
  int seeds = -1;
  double delta = -1.0;
  std::string variant;
  int json_indent = 2;
  double t_bar_override = -1.0;
};

void apply_overrides(SpecDocument& doc, const CliOptions& opt) {
  if (opt.seed >= 0) doc.sim.master_seed = static_cast<std::uint64_t>(opt.seed);
  if (opt.seeds > 0) doc.sim.num_seeds = opt.seeds;
  if (opt.delta > 0.0) doc.sim.delta = opt.delta;
  if (!opt.variant.empty()) {
    if (opt.variant == "baseline") doc.sim.variant = Variant::baseline;
    else if (opt.variant == "bounded_memory_z")
      doc.sim.variant = Variant::bounded_memory_z;
    else if (opt.variant == "quality_announcement")
      doc.sim.variant = Variant::quality_announcement;
    else if (opt.variant == "preannounce_feasibility")
      doc.sim.variant = Variant::preannounce_feasibility;
    else throw InputError("unknown variant '" + opt.variant + "'");
  }
  if (!doc.has_sim &&
      (opt.seed >= 0 || opt.seeds > 0 || opt.delta > 0.0 || !opt.variant.empty()))
    throw InputError("spec: 'sim' section required for simulation flags");
}

void emit(const json& j, const CliOptions& opt) {
  std::cout << j.dump(opt.json_indent) << '\n';
}

int cmd_solve(const CliOptions& opt) {
  SpecDocument doc = load_spec_file(opt.spec_path);
  emit(solve_report(doc), opt);
  return 0;
}

int cmd_bound(const CliOptions& opt) {
  SpecDocument doc = load_spec_file(opt.spec_path);
  apply_overrides(doc, opt);
  emit(bound_report(doc), opt);
  return 0;
}

SimResult run_configured(const SpecDocument& doc, const std::string& out_dir) {
  SimConfig cfg = doc.sim;
  cfg.validate();
  SimResult result;
  Trajectory first;
  switch (cfg.variant) {
    case Variant::baseline:
    case Variant::bounded_memory_z: {
      auto sc = build_scenario(doc);
      result = estimate(cfg, sc);
      if (!out_dir.empty()) {
        SimConfig one = cfg;
        one.log_rows = true;
        first = run_episode(one, sc, 0);
      }
      break;
    }
    case Variant::quality_announcement: {
      auto qs = build_quality_scenario(doc);
      result = estimate_quality(cfg, qs);
      if (!out_dir.empty()) {
        SimConfig one = cfg;
        one.log_rows = true;
        first = run_quality_variant(one, qs, 0);
      }
      break;
    }
    case Variant::preannounce_feasibility: {
      auto ps = build_preannounce_scenario(doc);
      result = estimate_preannounce(cfg, ps);
      if (!out_dir.empty()) {
        SimConfig one = cfg;
        one.log_rows = true;
        first = run_preannounce_variant(one, ps, 0);
      }
      break;
    }
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream csv(out_dir + "/trajectory_episode0.csv");
    if (!csv) throw InputError("cannot write to '" + out_dir + "'");
    write_trajectory_csv(csv, first);
  }
  return result;
}

int cmd_simulate(const CliOptions& opt) {
  SpecDocument doc = load_spec_file(opt.spec_path);
  if (!doc.has_sim)
    throw InputError("spec: 'sim' section required for simulate");
  apply_overrides(doc, opt);
  SimResult result = run_configured(doc, opt.out_dir);
  json out = sim_result_to_json(result);
  emit(out, opt);
  if (!opt.out_dir.empty()) {
    std::ofstream js(opt.out_dir + "/sim_result.json");
    js << out.dump(opt.json_indent) << '\n';
  }
  return 0;
}

void merge(VerificationReport& into, const VerificationReport& from) {
  for (const auto& c : from.checks) into.checks.push_back(c);
}

void skip(VerificationReport& rep, const std::string& name,
          const std::string& why) {
  auto& c = rep.add(name);
  c.pass = true;
  c.witness = "skipped: " + why;
}

bool deterministic_rows(const QualityGame& q) {
  for (int a = 0; a < q.num_a(); ++a)
    for (int x = 0; x < q.num_x(); ++x) {
      double v = q.g_row(a)[x];
      if (v != 0.0 && v != 1.0) return false;
    }
  return true;
}

int cmd_verify(const CliOptions& opt) {
  SpecDocument doc = load_spec_file(opt.spec_path);
  apply_overrides(doc, opt);
  const StageGame& g = doc.game;
  Dist pt = doc.env.p_theta();
  VerificationReport rep;

  // Theorem 2: construct the low-payoff profile and verify it as Nash.
  auto aux = solve_aux_no_comm(g, pt);
  auto rec = solve_aux_recommendation(g, pt);
  auto v1p = solve_v1_prime(g, pt, aux.v1_min, rec.v_hat_1);
  const V1PrimeWitness& wit =
      doc.strict_subset ? v1p.witness_strict : v1p.witness;
  if (wit.feasible) {
    const AuxEquilibrium* worst = &aux.equilibria.front();
    for (const auto& eq : aux.equilibria)
      if (eq.value < worst->value) worst = &eq;
    auto prof = theorem2_profile(g, pt, wit, *worst);
    double delta = doc.has_sim ? doc.sim.delta : 0.9;
    auto nash = verify_nash_profile(prof, g, pt, delta);
    merge(rep, nash.report);
    auto& c = rep.add("theorem2_value_equals_v1_prime");
    c.measured = nash.on_value;
    c.bound = wit.value;
    c.tolerance = 1e-9;
    c.pass = std::abs(nash.on_value - wit.value) <= c.tolerance;
  } else {
    skip(rep, "theorem2_profile", "no feasible v1_prime witness");
  }

  // Theorem 1 / Corollary 1: bound dominance on the configured simulation.
  auto asm_rep = check_assumptions(doc.env, doc.signals);
  bool sim_variant = doc.has_sim && (doc.sim.variant == Variant::baseline ||
                                     doc.sim.variant == Variant::bounded_memory_z);
  if (sim_variant && (!asm_rep.a1 || !asm_rep.a2_i || !asm_rep.a2_ii)) {
    skip(rep, "theorem1_bound", "assumption failed");
  } else if (sim_variant) {
    auto lb = lambda_bar(g, pt);
    double rho = doc.env.rho_lower();
    double xi = 1.0 - (1.0 - lb.lambda_bar) * rho;
    if (doc.sim.variant == Variant::bounded_memory_z)
      xi = xi_hat(rho, doc.sim.memory_K, xi).xi_hat;
    double D = xi < 1.0 ? d_star(doc.signals, xi) : 0.0;
    if (D <= 0.0) {
      skip(rep, "theorem1_bound", "KL separation is zero");
    } else {
      double T = opt.t_bar_override >= 0.0
                     ? opt.t_bar_override
                     : static_cast<double>(t_bar(doc.sim.pi0, D));
      auto stack = stackelberg(g, pt);
      double eps = 0.0;
      for (int th = 0; th < g.num_theta(); ++th)
        for (SubsetMask mask = 1; mask < (SubsetMask{1} << doc.env.num_a); ++mask)
          if (!(mask & (SubsetMask{1} << stack.a_star[th])))
            eps += doc.env.p(th, mask);
      double min_p = *std::min_element(pt.begin(), pt.end());
      double bound = bound_3_6(stack.expected, g.u1_min(), doc.sim.delta, eps,
                               min_p, static_cast<long>(std::llround(T)));
      SpecDocument honest = doc;
      honest.sim.p1_type = P1Type::honest;
      SimResult sim = run_configured(honest, "");
      merge(rep, check_theorem1_bound(sim, bound, T, doc.sim.pi0));
    }
  }

  // Corollary 2: quality variant payoff and the deterministic counterexample.
  if (doc.has_quality) {
    const QualityGame& q = doc.quality.game;
    if (doc.has_sim && doc.sim.variant == Variant::quality_announcement &&
        !deterministic_rows(q)) {
      auto vss = commitment_payoff_quality(q);
      SpecDocument honest = doc;
      honest.sim.p1_type = P1Type::honest;
      SimResult sim = run_configured(honest, "");
      merge(rep, check_corollary2(sim, vss.v_star_star, 0.05));
    }
    if (deterministic_rows(q)) {
      VerificationReport best;
      bool found = false;
      for (int a = 0; a < q.num_a() && !found; ++a)
        for (int b = 0; b < q.num_b() && !found; ++b) {
          auto r = verify_quality_counterexample(q, a, b);
          best = r;
          if (r.all_pass()) found = true;
        }
      merge(rep, best);
    }
  }

  // Corollary 3 / Appendix E: drift and concentration on logged trajectories.
  if (doc.has_sim && doc.sim.variant == Variant::preannounce_feasibility) {
    auto ps = build_preannounce_scenario(doc);
    SimConfig cfg = doc.sim;
    cfg.log_rows = true;
    cfg.validate();
    AppendixEInputs in;
    in.delta = cfg.delta;
    in.constants = corollary3_constants(1.0 - doc.env.flexibility(), cfg.eta,
                                        cfg.xi_threshold);
    in.expected_Z =
        ps.lik_h1 * std::log(ps.lik_h1 / ps.lik_o1) +
        (1.0 - ps.lik_h1) * std::log((1.0 - ps.lik_h1) / (1.0 - ps.lik_o1));
    for (int s = 0; s < cfg.num_seeds; ++s)
      in.trajectories.push_back(run_preannounce_variant(cfg, ps, s));
    merge(rep, check_appendixE(in));
  }

  json out = verification_to_json(rep);
  emit(out, opt);
  if (!opt.out_dir.empty()) {
    std::filesystem::create_directories(opt.out_dir);
    std::ofstream js(opt.out_dir + "/verification.json");
    js << out.dump(opt.json_indent) << '\n';
  }
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reputation-game solver, simulator, and bound verifier"};
  app.require_subcommand(1);
  CliOptions opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--spec", opt.spec_path, "path to the game spec JSON")
        ->required();
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--json-indent", opt.json_indent, "JSON indent width");
  };
  auto add_sim_flags = [&](CLI::App* sub) {
    sub->add_option("--seed", opt.seed, "master seed override");
    sub->add_option("--seeds", opt.seeds, "number of seeds override");
    sub->add_option("--delta", opt.delta, "discount factor override");
    sub->add_option("--variant", opt.variant, "variant override");
  };

  CLI::App* solve = app.add_subcommand("solve", "static solver report");
  add_common(solve);
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo estimates");
  add_common(simulate);
  add_sim_flags(simulate);
  CLI::App* verify = app.add_subcommand("verify", "theorem and bound checks");
  add_common(verify);
  add_sim_flags(verify);
  verify->add_option("--t-bar", opt.t_bar_override,
                     "override the T-bar period bound");
  CLI::App* bound = app.add_subcommand("bound", "bound constants report");
  add_common(bound);
  add_sim_flags(bound);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(opt);
    if (simulate->parsed()) return cmd_simulate(opt);
    if (verify->parsed()) return cmd_verify(opt);
    return cmd_bound(opt);
  } catch (const SizeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
