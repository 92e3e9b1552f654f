#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "repgame/beliefs.hpp"
#include "repgame/quality.hpp"

using namespace repgame;
using repgame::testing::product_choice;

TEST_CASE("KL divergence basics") {
  CHECK(kl_divergence({0.3, 0.7}, {0.3, 0.7}) == Catch::Approx(0.0).margin(1e-15));
  CHECK(kl_divergence({0.0, 1.0}, {0.005, 0.995}) ==
        Catch::Approx(-std::log(0.995)).margin(1e-12));
  CHECK(kl_divergence({0.0, 1.0}, {1.0, 0.0}) == kInf);
  CHECK_THROWS_AS(kl_divergence({1.0}, {0.5, 0.5}), InputError);
}

TEST_CASE("KL nonnegativity, identity of indiscernibles, chain rule") {
  Rng rng(42);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int iter = 0; iter < 10000; ++iter) {
    int n = 2 + static_cast<int>(iter % 4);
    Dist p(n), q(n);
    double sp = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
      p[i] = u(rng);
      q[i] = u(rng);
      sp += p[i];
      sq += q[i];
    }
    for (int i = 0; i < n; ++i) {
      p[i] /= sp;
      q[i] /= sq;
    }
    double d = kl_divergence(p, q);
    CHECK(d >= 0.0);
    CHECK(kl_divergence(p, p) <= 1e-12);
    bool equal = true;
    for (int i = 0; i < n; ++i)
      if (std::abs(p[i] - q[i]) > 1e-9) equal = false;
    if (d < 1e-12) {
      // d == 0 only when the distributions coincide
      CHECK(equal);
    }
    // product experiment: KL adds over independent stages
    Dist pp(n * n), qq(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        pp[i * n + j] = p[i] * p[j];
        qq[i * n + j] = q[i] * q[j];
      }
    CHECK(kl_divergence(pp, qq) == Catch::Approx(2.0 * d).margin(1e-9));
  }
}

TEST_CASE("Bayes type update") {
  auto b = BeliefState::from_pi(0.5);
  CHECK(bayes_update_type(b, 0.4, 0.4).pi == Catch::Approx(0.5));
  CHECK(bayes_update_type(b, 1.0, 0.5).pi == Catch::Approx(2.0 / 3.0));
  CHECK(bayes_update_type(b, 0.0, 0.3).pi == Catch::Approx(0.0));
  CHECK(bayes_update_type(b, 0.0, 0.3).log_lr == -kInf);
  CHECK_THROWS_AS(bayes_update_type(b, 0.0, 0.0), InputError);
  // log-likelihood consistency
  auto b2 = bayes_update_type(b, 0.9, 0.3);
  CHECK(b2.log_lr == Catch::Approx(std::log(b2.pi / (1 - b2.pi))).margin(1e-9));
}

TEST_CASE("posterior martingale under the prior mixture measure") {
  // Exact: sum over signals of P_mix(y) pi'(y) = pi.
  Rng rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int iter = 0; iter < 2000; ++iter) {
    double pi = 0.05 + 0.9 * u(rng);
    int ny = 2 + iter % 3;
    Dist lh(ny), lo(ny);
    double sh = 0, so = 0;
    for (int y = 0; y < ny; ++y) {
      lh[y] = u(rng) + 1e-3;
      lo[y] = u(rng) + 1e-3;
      sh += lh[y];
      so += lo[y];
    }
    for (int y = 0; y < ny; ++y) {
      lh[y] /= sh;
      lo[y] /= so;
    }
    auto b = BeliefState::from_pi(pi);
    double expectation = 0.0;
    for (int y = 0; y < ny; ++y) {
      double pmix = pi * lh[y] + (1 - pi) * lo[y];
      expectation += pmix * bayes_update_type(b, lh[y], lo[y]).pi;
    }
    CHECK(expectation == Catch::Approx(pi).margin(1e-12));
  }
}

TEST_CASE("assessment identity holds by construction") {
  auto a = Assessment::make({0.2, 0.8}, {0.9, 0.4});
  CHECK(a.xi == Catch::Approx(0.2 * 0.9 + 0.8 * 0.4).margin(1e-15));
  // xi <= xi* when some announcement has low credibility and mass >= rho
  double lambda_bar_v = 0.5, rho = 0.1;
  double xi_star = 1.0 - (1.0 - lambda_bar_v) * rho;
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int iter = 0; iter < 2000; ++iter) {
    double alpha0 = rho + (1.0 - rho) * u(rng);
    double xi0 = lambda_bar_v * u(rng);  // <= lambda_bar
    auto as = Assessment::make({alpha0, 1.0 - alpha0}, {xi0, u(rng)});
    CHECK(as.xi <= xi_star + 1e-12);
  }
}

TEST_CASE("lambda_bar of product choice is one half") {
  auto g = product_choice();
  auto r = lambda_bar(g, Dist{0.5, 0.5});
  CHECK_FALSE(r.degenerate);
  CHECK(r.lambda_bar == Catch::Approx(0.5).margin(1e-9));

  // Brute-force oracle: the only residual against H is L (and vice versa);
  // scan lambda on a fine grid for the smallest value forcing strictness.
  auto forced = [&](int a, int other, double lam) {
    Dist mix(2, 0.0);
    mix[a] = lam;
    mix[other] = 1.0 - lam;
    auto br = best_reply_set_pure(g, a);
    double best_in = -1e18, best_out = -1e18;
    for (int b = 0; b < 2; ++b) {
      double v = mix[0] * g.u2(0, b) + mix[1] * g.u2(1, b);
      bool inside = std::find(br.begin(), br.end(), b) != br.end();
      (inside ? best_in : best_out) = std::max(inside ? best_in : best_out, v);
    }
    return best_in > best_out + 1e-12;
  };
  double grid_threshold = 1.0;
  for (double lam = 1.0; lam >= 0.0; lam -= 1e-5) {
    if (forced(0, 1, lam) && forced(1, 0, lam)) grid_threshold = lam;
    else break;
  }
  CHECK(grid_threshold == Catch::Approx(0.5).margin(2e-5));
}

TEST_CASE("lambda_bar vacuous cases") {
  StageGame g;
  g.theta_labels = {"s"};
  g.a_labels = {"a0", "a1"};
  g.b_labels = {"b0"};
  g.u1_table = {0, 1};
  g.u2_table = {0, 0};
  g.validate();
  CHECK(lambda_bar(g, Dist{1.0}).lambda_bar == Catch::Approx(0.0));

  // b0 strictly dominant: best reply forced at every belief.
  StageGame d;
  d.theta_labels = {"s"};
  d.a_labels = {"a0", "a1"};
  d.b_labels = {"b0", "b1"};
  d.u1_table = {1, 0, 0, 1};
  d.u2_table = {3, 1, 4, 2};
  d.validate();
  CHECK(lambda_bar(d, Dist{1.0}).lambda_bar == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("D* for the indicator structure") {
  auto sig = make_indicator_signals(2);
  CHECK(d_star(sig, 0.995) == Catch::Approx(-std::log(0.995)).margin(1e-12));
  CHECK(d_star(sig, 0.0) == kInf);  // disjoint supports

  // F(.|a,m) = F* off the diagonal: D* collapses to zero.
  SignalStructure flat;
  flat.num_a = 2;
  flat.y_labels = {"0", "1"};
  flat.f_table = {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  flat.validate();
  CHECK(d_star(flat, 0.5) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("T-bar period bound") {
  double D = -std::log(0.995);
  CHECK(t_bar(0.1, D) == 460);
  CHECK(t_bar(1.0, D) == 0);
  CHECK(t_bar(std::exp(-D), D) == 1);
  CHECK_THROWS_AS(t_bar(0.1, 0.0), InputError);
  CHECK_THROWS_AS(t_bar(0.0, D), InputError);
}

TEST_CASE("payoff floor (3.6)") {
  // delta -> 1 limit with eps = 0 returns v1*.
  CHECK(bound_3_6(0.5, -3.0, 1.0, 0.0, 0.5, 460) == Catch::Approx(0.5));
  // plug-in value for the product-choice instance
  double dT = std::pow(0.99999, 460.0);
  double inner = 0.98 * 0.5 + 0.02 * (-3.0);
  double expect = dT * inner + (1.0 - dT) * (-3.0);
  CHECK(bound_3_6(0.5, -3.0, 0.99999, 0.01, 0.5, 460) ==
        Catch::Approx(expect).margin(1e-12));
  // delta = 0 floors out at the lowest payoff
  CHECK(bound_3_6(0.5, -3.0, 0.0, 0.01, 0.5, 460) == Catch::Approx(-3.0));
  CHECK_THROWS_AS(bound_3_6(0.5, -3.0, 0.9, 0.6, 0.5, 460), InputError);
}

TEST_CASE("bounded-memory xi-hat") {
  CHECK(xi_hat(0.01, 0, 0.995).xi_hat == Catch::Approx(0.995));
  CHECK(xi_hat(0.01, 1, 0.995).xi_hat == Catch::Approx(0.99995).margin(1e-12));
  CHECK(xi_hat(0.3, 2, 1.0).xi_hat == Catch::Approx(1.0));
  auto degenerate = xi_hat(0.0, 1, 0.995);
  CHECK(degenerate.xi_hat == Catch::Approx(1.0));
  CHECK(degenerate.degenerate);
}

TEST_CASE("Corollary 3 constants") {
  auto c0 = corollary3_constants(0.0, 0.1, 0.5);
  CHECK(c0.beta == Catch::Approx(0.0).margin(1e-15));
  CHECK(c0.good_fraction == Catch::Approx(1.0));

  auto c = corollary3_constants(0.001, 0.1, 0.5);
  double beta = bernoulli_kl(0.999, 0.9999);
  double alpha = bernoulli_kl(0.999, 0.95) - beta;
  CHECK(c.beta == Catch::Approx(beta).margin(1e-12));
  CHECK(c.alpha == Catch::Approx(alpha).margin(1e-12));
  CHECK(c.good_fraction == Catch::Approx(alpha / (alpha + beta)).margin(1e-12));
  CHECK_FALSE(c.degenerate);

  // alpha / beta diverges as rho -> 0 for fixed eta.
  double prev_ratio = 0.0;
  for (double rho : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    auto cc = corollary3_constants(rho, 0.1, 0.5);
    double ratio = cc.alpha / cc.beta;
    CHECK(ratio > prev_ratio);
    prev_ratio = ratio;
  }
  CHECK(prev_ratio > 1e4);
}

TEST_CASE("quality commitment payoff") {
  QualityGame q;
  q.a_labels = {"H", "L"};
  q.x_labels = {"H", "L"};
  q.b_labels = {"T", "N"};
  q.u1_table = {1, -1,   // effort H against T, N
                2, 0};   // effort L
  q.u2_table = {2, 0,    // quality H
                -2, 0};  // quality L
  q.g_table = {0.9, 0.1, 0.1, 0.9};
  auto r = commitment_payoff_quality(q);
  // max{0.9*1 + 0.1*(-1), 0.1*2 + 0.9*0} = 0.8 via effort H
  CHECK(r.v_star_star == Catch::Approx(0.8).margin(1e-12));
  CHECK(q.a_labels[r.a_star] == "H");

  // deterministic quality: same as the unrestricted commitment to H
  QualityGame det = q;
  det.g_table = {1, 0, 0, 1};
  auto rd = commitment_payoff_quality(det);
  CHECK(rd.v_star_star == Catch::Approx(1.0).margin(1e-12));

  // g independent of a: effort only matters through u1 directly
  QualityGame ind = q;
  ind.g_table = {0.6, 0.4, 0.6, 0.4};
  auto ri = commitment_payoff_quality(ind);
  CHECK(ri.v_star_star ==
        Catch::Approx(std::max(0.6 * 1 + 0.4 * (-1), 0.6 * 2 + 0.4 * 0)).margin(1e-12));

  CHECK(lambda_bar_quality(q) == Catch::Approx(0.5).margin(1e-9));
}
