#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "repgame/solvers.hpp"
#include "repgame/strategies.hpp"

using namespace repgame;
using repgame::testing::product_choice;
using repgame::testing::product_choice_env;

namespace {

std::vector<int> a_star_map_of(const StageGame& g, const Dist& pt) {
  return stackelberg(g, pt).a_star;
}

}  // namespace

TEST_CASE("honest star policy announces the Stackelberg action when feasible") {
  auto g = product_choice();
  auto env = product_choice_env(0.5, 0.01);
  auto pol = honest_star_policy(g, a_star_map_of(g, {0.5, 0.5}));
  pol.validate(env);
  REQUIRE(pol.honest);
  const auto& t = pol.regimes[0].table;
  SubsetMask full = 0b11;
  // theta_g announces H, theta_b announces L, both keep their word.
  CHECK(t.ann_row(0, full)[0] == Catch::Approx(1.0));
  CHECK(t.ann_row(1, full)[1] == Catch::Approx(1.0));
  CHECK(t.act_row(0, full, 0)[0] == Catch::Approx(1.0));
  // omega = {L} forces the announcement L for theta_g
  CHECK(t.ann_row(0, 0b10)[1] == Catch::Approx(1.0));
}

TEST_CASE("honest star policy falls back to uniform over omega") {
  StageGame g;
  g.theta_labels = {"s"};
  g.a_labels = {"a0", "a1", "a2"};
  g.b_labels = {"b"};
  g.u1_table = {3, 1, 0};
  g.u2_table = {0, 0, 0};
  g.validate();
  auto pol = honest_star_policy(g, {0});
  const auto& t = pol.regimes[0].table;
  // omega = {a1, a2} excludes a* = a0: uniform announcement
  const double* ar = t.ann_row(0, 0b110);
  CHECK(ar[0] == 0.0);
  CHECK(ar[1] == Catch::Approx(0.5));
  CHECK(ar[2] == Catch::Approx(0.5));
}

TEST_CASE("myopic greedy keeps or breaks the word by stage payoffs") {
  auto g = product_choice();
  auto env = product_choice_env(0.5, 0.01);
  auto pol = myopic_greedy_policy(g, a_star_map_of(g, {0.5, 0.5}), 0.0);
  pol.validate(env);
  const auto& t = pol.regimes[0].table;
  SubsetMask full = 0b11;
  // theta_g announced H, trusted response is T; greedy action is L (2 > 1)
  CHECK(t.act_row(0, full, 0)[1] == Catch::Approx(1.0));
  // theta_b announced L, trusted response is N; greedy action is L (0 > -3)
  CHECK(t.act_row(1, full, 1)[1] == Catch::Approx(1.0));

  auto half = myopic_greedy_policy(g, a_star_map_of(g, {0.5, 0.5}), 0.3);
  CHECK(half.regimes[0].table.act_row(0, full, 0)[0] == Catch::Approx(0.3));
  CHECK(half.regimes[0].table.act_row(0, full, 0)[1] == Catch::Approx(0.7));
}

TEST_CASE("threshold milking switches regimes at the belief threshold") {
  auto g = product_choice();
  auto pol = threshold_milking_policy(g, a_star_map_of(g, {0.5, 0.5}), 0.6, 0.0);
  CHECK(pol.active_index(0.2) == 0);
  CHECK(pol.active_index(0.6) == 1);
  CHECK(pol.active_index(0.9) == 1);
  SubsetMask full = 0b11;
  // below: mimic honest; above: break the word for theta_g
  CHECK(pol.active(0.2).act_row(0, full, 0)[0] == Catch::Approx(1.0));
  CHECK(pol.active(0.9).act_row(0, full, 0)[1] == Catch::Approx(1.0));
  CHECK_THROWS_AS(threshold_milking_policy(g, {0, 1}, 1.5, 0.0), InputError);
}

TEST_CASE("tremble wrap") {
  auto g = product_choice();
  auto base = honest_star_policy(g, a_star_map_of(g, {0.5, 0.5}));
  SubsetMask full = 0b11;

  auto id = tremble_wrap(base, 0.0);
  CHECK(id.regimes[0].table.ann == base.regimes[0].table.ann);

  auto tr = tremble_wrap(base, 0.1);
  CHECK(tr.regimes[0].table.ann_row(0, full)[0] == Catch::Approx(0.9));
  CHECK(tr.regimes[0].table.ann_row(0, full)[1] == Catch::Approx(0.1));
  for (int th = 0; th < 2; ++th)
    for (SubsetMask mask = 1; mask < 4; ++mask)
      for (int m = 0; m < 2; ++m)
        CHECK(tr.regimes[0].table.ann_row(th, mask)[m] >= 0.1 - 1e-12);

  // uniform rows are a fixed point
  MarkovPolicy u = MarkovPolicy::zeros(1, 2);
  for (SubsetMask mask = 1; mask < 4; ++mask) {
    u.ann_row(0, mask)[0] = u.ann_row(0, mask)[1] = 0.5;
    for (int m = 0; m < 2; ++m) u.act_row(0, mask, m)[m] = 1.0;
  }
  Player1Policy up;
  up.regimes.push_back({0.0, u});
  auto uw = tremble_wrap(up, 0.2);
  CHECK(uw.regimes[0].table.ann_row(0, 3)[0] == Catch::Approx(0.5));

  CHECK_THROWS_AS(tremble_wrap(base, 0.6), InputError);
}

TEST_CASE("bound mode responder") {
  auto g = product_choice();
  auto p2 = make_bound_mode_player2(g, {0.5, 0.5}, 0.5);
  // m = H: BR2(H) = {T}; adversarial action is N
  auto d = p2.respond(0, 0.9);
  CHECK(d.trusted);
  CHECK(g.b_labels[d.b] == "T");
  d = p2.respond(0, 0.3);
  CHECK_FALSE(d.trusted);
  CHECK(g.b_labels[d.b] == "N");
  // boundary falls on the adversarial side
  CHECK_FALSE(p2.respond(0, 0.5).trusted);
  // m = L: BR2(L) = {N}, and N is also adversarial
  CHECK(g.b_labels[p2.respond(1, 0.9).b] == "N");
  CHECK(g.b_labels[p2.respond(1, 0.1).b] == "N");
}

TEST_CASE("theorem 2 profile for product choice") {
  auto g = product_choice();
  Dist pt = {0.5, 0.5};
  auto aux = solve_aux_no_comm(g, pt);
  auto rec = solve_aux_recommendation(g, pt);
  auto v1p = solve_v1_prime(g, pt, aux.v1_min, rec.v_hat_1);
  REQUIRE(v1p.any_feasible);
  const AuxEquilibrium* worst = &aux.equilibria.front();
  for (const auto& eq : aux.equilibria)
    if (eq.value < worst->value) worst = &eq;

  auto prof = theorem2_profile(g, pt, v1p.witness, *worst);
  CHECK(prof.m_star == std::vector<int>{1, 1});  // both types announce L
  CHECK(prof.beta[1][1] == Catch::Approx(1.0));  // response N after L
  CHECK(prof.on_value == Catch::Approx(v1p.value()).margin(1e-9));
  CHECK(prof.pun_value <= prof.on_value + 1e-9);

  // punishment better than the on-path value is a construction error
  AuxEquilibrium fake;
  fake.sigma1 = {{0.0, 1.0}, {0.0, 1.0}};
  fake.sigma2 = {1.0, 0.0};  // L against T pays 2 in both states
  CHECK_THROWS_AS(theorem2_profile(g, pt, v1p.witness, fake), InputError);
}
