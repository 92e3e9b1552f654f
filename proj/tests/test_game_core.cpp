#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "repgame/stage_game.hpp"

using namespace repgame;
using repgame::testing::product_choice;
using repgame::testing::product_choice_env;

TEST_CASE("best reply sets in the product choice game") {
  auto g = product_choice();
  CHECK(best_reply_set(g, {1.0, 0.0}) == std::vector<int>{0});  // H -> T
  CHECK(best_reply_set(g, {0.0, 1.0}) == std::vector<int>{1});  // L -> N
  // 0.5H + 0.5L: both replies yield 0.
  CHECK(best_reply_set(g, {0.5, 0.5}) == std::vector<int>{0, 1});
  CHECK_THROWS_AS(best_reply_set(g, {0.5, 0.2}), InputError);
}

TEST_CASE("best reply with a single column") {
  StageGame g;
  g.theta_labels = {"s"};
  g.a_labels = {"a0", "a1"};
  g.b_labels = {"b0"};
  g.u1_table = {1, 2};
  g.u2_table = {0, 5};
  g.validate();
  CHECK(best_reply_set(g, {0.3, 0.7}) == std::vector<int>{0});
}

TEST_CASE("Stackelberg values") {
  auto g = product_choice();
  for (double pg : {0.3, 0.5, 0.9}) {
    auto r = stackelberg(g, {pg, 1.0 - pg});
    CHECK(r.a_star[0] == 0);  // H in theta_g
    CHECK(r.a_star[1] == 1);  // L in theta_b
    CHECK(r.v1_star[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(r.v1_star[1] == Catch::Approx(0.0).margin(1e-12));
    CHECK(r.expected == Catch::Approx(pg).margin(1e-12));
  }
}

TEST_CASE("Stackelberg of a constant game is the constant") {
  StageGame g;
  g.theta_labels = {"s0", "s1"};
  g.a_labels = {"a0", "a1"};
  g.b_labels = {"b0", "b1"};
  g.u1_table = std::vector<double>(8, 3.25);
  g.u2_table = {0, 1, 1, 0};
  g.validate();
  auto r = stackelberg(g, {0.4, 0.6});
  CHECK(r.expected == Catch::Approx(3.25).margin(1e-12));
}

TEST_CASE("feasible commitment values") {
  auto g = product_choice();
  // omega = {H, L}: same as unrestricted Stackelberg.
  CHECK(feasible_commitment_value(g, 0, 0b11) == Catch::Approx(1.0));
  // omega = {L}: only L, whose best reply is N.
  CHECK(feasible_commitment_value(g, 0, 0b10) == Catch::Approx(0.0));

  auto env = product_choice_env(0.5, 0.01);
  auto r = feasible_commitment(g, env);
  // 0.98 * stackelberg + eps-forced terms.
  // theta_g: {H,L}->1, {H}->1, {L}->0 ; theta_b: {H,L}->0, {H}->-1, {L}->0.
  double expected = 0.5 * (0.98 * 1.0 + 0.01 * 1.0 + 0.01 * 0.0) +
                    0.5 * (0.98 * 0.0 + 0.01 * -1.0 + 0.01 * 0.0);
  CHECK(r.expected == Catch::Approx(expected).margin(1e-12));
}

TEST_CASE("minmax of the product choice game is zero in both states") {
  auto g = product_choice();
  CHECK(minmax_value(g, 0) == Catch::Approx(0.0).margin(1e-9));
  CHECK(minmax_value(g, 1) == Catch::Approx(0.0).margin(1e-9));
  auto r = minmax(g, {0.5, 0.5});
  CHECK(r.expected == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("minmax with a single column equals the row max") {
  StageGame g;
  g.theta_labels = {"s"};
  g.a_labels = {"a0", "a1"};
  g.b_labels = {"b0"};
  g.u1_table = {-2, 7};
  g.u2_table = {0, 0};
  g.validate();
  CHECK(minmax_value(g, 0) == Catch::Approx(7.0).margin(1e-9));
}

TEST_CASE("minmax of matching pennies is the mixed value") {
  StageGame g;
  g.theta_labels = {"s"};
  g.a_labels = {"h", "t"};
  g.b_labels = {"H", "T"};
  g.u1_table = {1, -1, -1, 1};
  g.u2_table = {-1, 1, 1, -1};
  g.validate();
  CHECK(minmax_value(g, 0) == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("assumption report for the indicator structure") {
  auto g = product_choice();
  auto env = product_choice_env(0.5, 0.01);
  auto sig = make_indicator_signals(2);
  auto rep = check_assumptions(env, sig);
  CHECK(rep.a1);
  CHECK(rep.rho_lower == Catch::Approx(0.01));
  CHECK(rep.a2_i);
  CHECK(rep.a2_ii);
}

TEST_CASE("assumption 2(ii) fails when F is constant") {
  SignalStructure s;
  s.num_a = 2;
  s.y_labels = {"0", "1"};
  s.f_table = {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  s.validate();
  Environment env;
  env.num_theta = 1;
  env.num_a = 2;
  env.joint_p = {0.0, 0.3, 0.3, 0.4};
  env.validate();
  auto rep = check_assumptions(env, s);
  CHECK(rep.a2_i);
  CHECK_FALSE(rep.a2_ii);
}

TEST_CASE("supermodularity holds for product choice") {
  auto g = product_choice();
  auto rep = check_supermodularity(g, {0.5, 0.5});
  CHECK(rep.condition_part1);
  CHECK(rep.condition_part2);
  CHECK(rep.lemma1_2);
  REQUIRE(rep.a_order.size() == 2);
  CHECK(g.a_labels[rep.a_order[0]] == "L");  // L is the low action
  CHECK(g.b_labels[rep.b_order[0]] == "N");
}

TEST_CASE("supermodularity fails for a constant game") {
  StageGame g;
  g.theta_labels = {"s"};
  g.a_labels = {"a0", "a1"};
  g.b_labels = {"b0", "b1"};
  g.u1_table = std::vector<double>(4, 1.0);
  g.u2_table = {0, 0, 0, 0};
  g.validate();
  auto rep = check_supermodularity(g, {1.0});
  CHECK_FALSE(rep.condition_part1);
}

TEST_CASE("supermodularity part 2 vacuously fails with one action") {
  StageGame g;
  g.theta_labels = {"s"};
  g.a_labels = {"a0"};
  g.b_labels = {"b0", "b1"};
  g.u1_table = {0, 1};
  g.u2_table = {1, 0};
  g.validate();
  auto rep = check_supermodularity(g, {1.0});
  CHECK_FALSE(rep.condition_part2);
}

TEST_CASE("core invariants across random games") {
  Rng rng(12345);
  std::uniform_real_distribution<double> pay(-5.0, 5.0);
  std::uniform_int_distribution<int> dim(1, 3);
  for (int iter = 0; iter < 200; ++iter) {
    StageGame g;
    int nt = dim(rng), na = dim(rng), nb = dim(rng);
    for (int i = 0; i < nt; ++i) g.theta_labels.push_back("t" + std::to_string(i));
    for (int i = 0; i < na; ++i) g.a_labels.push_back("a" + std::to_string(i));
    for (int i = 0; i < nb; ++i) g.b_labels.push_back("b" + std::to_string(i));
    for (int i = 0; i < nt * na * nb; ++i) g.u1_table.push_back(pay(rng));
    for (int i = 0; i < na * nb; ++i) g.u2_table.push_back(pay(rng));
    g.validate();
    Dist pt = uniform_dist(nt);
    auto stack = stackelberg(g, pt);
    for (int th = 0; th < nt; ++th) {
      // v1*(theta) >= pure maxmin (the minmax comparison fails in
      // adversarial games such as matching pennies, where best replies
      // punish the committed action)
      double pure_maxmin = -1e18;
      for (int a = 0; a < na; ++a) {
        double worst = 1e18;
        for (int b = 0; b < nb; ++b) worst = std::min(worst, g.u1(th, a, b));
        pure_maxmin = std::max(pure_maxmin, worst);
      }
      CHECK(stack.v1_star[th] >= pure_maxmin - 1e-7);
      // u1*(theta, A) == v1*(theta)
      CHECK(feasible_commitment_value(g, th, (1u << na) - 1) ==
            Catch::Approx(stack.v1_star[th]).margin(1e-9));
      // monotone in omega
      for (SubsetMask w = 1; w < (1u << na); ++w)
        for (SubsetMask w2 = 1; w2 < (1u << na); ++w2)
          if ((w & w2) == w)
            CHECK(feasible_commitment_value(g, th, w) <=
                  feasible_commitment_value(g, th, w2) + 1e-9);
    }
    // pure best reply equals pure argmax of u2
    for (int a = 0; a < na; ++a) {
      auto br = best_reply_set_pure(g, a);
      double best = -1e18;
      for (int b = 0; b < nb; ++b) best = std::max(best, g.u2(a, b));
      for (int b : br) CHECK(g.u2(a, b) >= best - 1e-8);
    }
    // rescaling u1 by a positive constant preserves witnesses
    StageGame g2 = g;
    for (auto& v : g2.u1_table) v *= 2.5;
    auto stack2 = stackelberg(g2, pt);
    CHECK(stack2.a_star == stack.a_star);
    for (int th = 0; th < nt; ++th)
      CHECK(stack2.v1_star[th] == Catch::Approx(2.5 * stack.v1_star[th]).margin(1e-7));
  }
}

TEST_CASE("indicator signals always satisfy assumption 2") {
  for (int na = 1; na <= 4; ++na) {
    auto sig = make_indicator_signals(na);
    Environment env;
    env.num_theta = 1;
    env.num_a = na;
    env.joint_p.assign(1u << na, 0.0);
    double mass = 1.0 / ((1u << na) - 1);
    for (SubsetMask w = 1; w < (1u << na); ++w) env.joint_p[w] = mass;
    env.validate();
    auto rep = check_assumptions(env, sig);
    CHECK(rep.a2_i);
    CHECK(rep.a2_ii);
  }
}
